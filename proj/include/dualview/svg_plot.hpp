#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dualview/metrics.hpp"

namespace dualview {

struct PlotSeries {
  std::string label;
  PRCurve curve;
};

// Precision-recall chart on the unit square, ticks every 0.1, one polyline
// per series with a legend. Output is byte-identical for identical input.
std::string render_pr_svg(const std::vector<PlotSeries>& series);

void write_pr_svg(const std::vector<PlotSeries>& series,
                  const std::filesystem::path& path);

// Scatter of box dimensions with centroid overlays, used by the anchors
// report.
struct ScatterPoint {
  double x;
  double y;
};

std::string render_dims_svg(const std::vector<ScatterPoint>& dims,
                            const std::vector<ScatterPoint>& centroids,
                            double max_w, double max_h);

void write_dims_svg(const std::vector<ScatterPoint>& dims,
                    const std::vector<ScatterPoint>& centroids, double max_w,
                    double max_h, const std::filesystem::path& path);

}  // namespace dualview
