#include "dualview/svg_plot.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 560;
constexpr double kPlotX = 80.0;
constexpr double kPlotY = 40.0;
constexpr double kPlotW = 560.0;
constexpr double kPlotH = 460.0;

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double map_x(double recall) { return kPlotX + recall * kPlotW; }
double map_y(double precision) { return kPlotY + (1.0 - precision) * kPlotH; }

void append_axes(std::ostringstream& svg, const char* x_label,
                 const char* y_label, double x_span, double y_span) {
  svg << "<rect x=\"" << fmt(kPlotX) << "\" y=\"" << fmt(kPlotY)
      << "\" width=\"" << fmt(kPlotW) << "\" height=\"" << fmt(kPlotH)
      << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 10; ++i) {
    const double f = i / 10.0;
    const double x = kPlotX + f * kPlotW;
    const double y = kPlotY + (1.0 - f) * kPlotH;
    if (i > 0 && i < 10) {
      svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kPlotY)
          << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(kPlotY + kPlotH)
          << "\" stroke=\"#dddddd\"/>\n";
      svg << "<line x1=\"" << fmt(kPlotX) << "\" y1=\"" << fmt(y)
          << "\" x2=\"" << fmt(kPlotX + kPlotW) << "\" y2=\"" << fmt(y)
          << "\" stroke=\"#dddddd\"/>\n";
    }
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kPlotY + kPlotH + 18.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">"
        << fmt(f * x_span) << "</text>\n";
    svg << "<text x=\"" << fmt(kPlotX - 8.0) << "\" y=\"" << fmt(y + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">"
        << fmt(f * y_span) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(kPlotX + kPlotW / 2.0) << "\" y=\""
      << fmt(kPlotY + kPlotH + 40.0)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">"
      << x_label << "</text>\n";
  svg << "<text x=\"" << fmt(kPlotX - 50.0) << "\" y=\""
      << fmt(kPlotY + kPlotH / 2.0)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 "
      << fmt(kPlotX - 50.0) << " " << fmt(kPlotY + kPlotH / 2.0) << ")\">"
      << y_label << "</text>\n";
}

void append_legend(std::ostringstream& svg,
                   const std::vector<std::string>& labels) {
  const double lx = kPlotX + kPlotW - 200.0;
  double ly = kPlotY + 16.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const char* color = kPalette[i % kPalette.size()];
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4.0)
        << "\" x2=\"" << fmt(lx + 26.0) << "\" y2=\"" << fmt(ly - 4.0)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(lx + 32.0) << "\" y=\"" << fmt(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << labels[i]
        << "</text>\n";
    ly += 18.0;
  }
}

std::string svg_header() {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  return svg.str();
}

}  // namespace

std::string render_pr_svg(const std::vector<PlotSeries>& series) {
  if (series.empty()) {
    throw ValidationError("render_pr_svg requires at least one curve");
  }
  std::ostringstream svg;
  svg << svg_header();
  append_axes(svg, "Recall", "Precision", 1.0, 1.0);

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& p : series[i].curve.points) {
      if (!first) svg << ' ';
      svg << fmt(map_x(p.recall)) << ',' << fmt(map_y(p.precision));
      first = false;
    }
    svg << "\"/>\n";
    labels.push_back(series[i].label);
  }
  append_legend(svg, labels);
  svg << "</svg>\n";
  return svg.str();
}

void write_pr_svg(const std::vector<PlotSeries>& series,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << render_pr_svg(series);
}

std::string render_dims_svg(const std::vector<ScatterPoint>& dims,
                            const std::vector<ScatterPoint>& centroids,
                            double max_w, double max_h) {
  if (!(max_w > 0.0) || !(max_h > 0.0)) {
    throw ValidationError("render_dims_svg needs positive axis spans");
  }
  std::ostringstream svg;
  svg << svg_header();
  append_axes(svg, "Box width (px)", "Box height (px)", max_w, max_h);
  for (const auto& d : dims) {
    svg << "<circle cx=\"" << fmt(map_x(d.x / max_w)) << "\" cy=\""
        << fmt(map_y(d.y / max_h))
        << "\" r=\"2\" fill=\"#1f77b4\" fill-opacity=\"0.35\"/>\n";
  }
  for (const auto& c : centroids) {
    svg << "<circle cx=\"" << fmt(map_x(c.x / max_w)) << "\" cy=\""
        << fmt(map_y(c.y / max_h))
        << "\" r=\"5\" fill=\"none\" stroke=\"#d62728\" "
           "stroke-width=\"2\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_dims_svg(const std::vector<ScatterPoint>& dims,
                    const std::vector<ScatterPoint>& centroids, double max_w,
                    double max_h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << render_dims_svg(dims, centroids, max_w, max_h);
}

}  // namespace dualview
