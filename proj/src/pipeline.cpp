#include "dualview/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualview/errors.hpp"
#include "dualview/svg_plot.hpp"

namespace dualview {

namespace {

double nearest_rank_p95(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(values.size())));
  return values[rank == 0 ? 0 : rank - 1];
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

PipelineResult run_pipeline(const std::vector<ScanAnnotation>& annos,
                            const std::filesystem::path& images_dir,
                            const Detector& detector,
                            double display_threshold, double budget_seconds) {
  if (!(display_threshold >= 0.0 && display_threshold <= 1.0)) {
    throw ValidationError("display threshold must lie in [0, 1]");
  }

  // Both views of a bag are processed back to back, bags in stable order.
  std::vector<const ScanAnnotation*> ordered;
  ordered.reserve(annos.size());
  for (const auto& anno : annos) ordered.push_back(&anno);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ScanAnnotation* a, const ScanAnnotation* b) {
                     return std::tie(a->bag_id, a->scan_id, a->view) <
                            std::tie(b->bag_id, b->scan_id, b->view);
                   });

  PipelineResult result;
  result.latency.budget_seconds = budget_seconds;

  std::string current_scan;
  double current_elapsed = 0.0;
  int current_views = 0;
  bool scan_open = false;
  auto close_scan = [&]() {
    if (scan_open && current_views > 0) {
      result.latency.per_scan_seconds.push_back(current_elapsed);
    }
    current_elapsed = 0.0;
    current_views = 0;
    scan_open = false;
  };

  for (const ScanAnnotation* anno : ordered) {
    if (!scan_open || anno->scan_id != current_scan) {
      close_scan();
      current_scan = anno->scan_id;
      scan_open = true;
    }

    const std::string name = anno->image_path.empty()
                                 ? anno->scan_id + "_" +
                                       to_string(anno->view) + ".png"
                                 : anno->image_path;
    ImageRgb8 image;
    try {
      image = read_png_rgb8(images_dir / name);
    } catch (const IoError& e) {
      result.latency.errors.push_back(anno->scan_id + " (" +
                                      to_string(anno->view) + "): " +
                                      e.what());
      continue;
    }

    const auto start = std::chrono::steady_clock::now();
    std::vector<Detection> dets =
        detector.detect(image, anno->scan_id, anno->view);
    const auto stop = std::chrono::steady_clock::now();
    current_elapsed += std::chrono::duration<double>(stop - start).count();
    ++current_views;

    for (auto& det : dets) {
      if (det.score > display_threshold) {
        result.detections.push_back(std::move(det));
      }
    }
  }
  close_scan();

  auto& latency = result.latency;
  if (!latency.per_scan_seconds.empty()) {
    double sum = 0.0;
    for (double t : latency.per_scan_seconds) sum += t;
    latency.mean_seconds =
        sum / static_cast<double>(latency.per_scan_seconds.size());
    latency.median_seconds = median(latency.per_scan_seconds);
    latency.p95_seconds = nearest_rank_p95(latency.per_scan_seconds);
  }
  latency.pass = latency.p95_seconds <= latency.budget_seconds;
  return result;
}

void write_latency_json(const LatencyReport& report,
                        const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["scan_count"] = report.per_scan_seconds.size();
  j["mean_seconds"] = report.mean_seconds;
  j["median_seconds"] = report.median_seconds;
  j["p95_seconds"] = report.p95_seconds;
  j["budget_seconds"] = report.budget_seconds;
  j["pass"] = report.pass;
  j["errors"] = report.errors;
  j["per_scan_seconds"] = report.per_scan_seconds;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

const char* to_string(EvalMode mode) {
  return mode == EvalMode::Single ? "single" : "fused";
}

EvalReport evaluate_detections(const std::vector<ScanAnnotation>& annos,
                               const std::vector<Detection>& dets,
                               const std::vector<EvalMode>& modes,
                               double iou_threshold) {
  std::vector<GroundTruthObject> gts;
  for (const auto& anno : annos) {
    gts.insert(gts.end(), anno.objects.begin(), anno.objects.end());
  }

  std::vector<ThreatClass> present;
  EvalReport report;
  for (ThreatClass cls : kAllClasses) {
    const bool has_gt = std::any_of(
        gts.begin(), gts.end(),
        [&](const GroundTruthObject& g) { return g.class_id == cls; });
    if (has_gt) {
      present.push_back(cls);
    } else {
      report.skipped.push_back(cls);
    }
  }

  for (EvalMode mode : modes) {
    std::map<ThreatClass, PRCurve> curves;
    if (mode == EvalMode::Single) {
      for (ThreatClass cls : present) {
        curves.emplace(cls, pr_curve(dets, gts, cls, iou_threshold));
      }
    } else {
      FusedEvaluation fused = fuse_evaluation(dets, gts, iou_threshold);
      curves = std::move(fused.curves);
    }
    report.curves.emplace_back(mode, std::move(curves));
  }
  return report;
}

void write_ap_table(std::ostream& out, const EvalReport& report) {
  out << "class";
  for (const auto& [mode, curves] : report.curves) {
    out << "\tAP(" << to_string(mode) << ")";
  }
  out << '\n';

  std::map<EvalMode, std::map<ThreatClass, double>> aps;
  for (ThreatClass cls : kAllClasses) {
    bool any = false;
    for (const auto& [mode, curves] : report.curves) {
      if (curves.count(cls)) any = true;
    }
    if (!any) continue;
    out << to_string(cls);
    for (const auto& [mode, curves] : report.curves) {
      auto it = curves.find(cls);
      if (it == curves.end()) {
        out << "\t-";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "\t%.4f", it->second.ap);
        out << buf;
        aps[mode][cls] = it->second.ap;
      }
    }
    out << '\n';
  }
  out << "mAP";
  for (const auto& [mode, curves] : report.curves) {
    if (curves.empty()) {
      out << "\t-";
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "\t%.4f", mean_ap(aps[mode]));
      out << buf;
    }
  }
  out << '\n';
  for (ThreatClass cls : report.skipped) {
    out << "# warning: no ground truth for class " << to_string(cls)
        << "; omitted from mAP\n";
  }
}

void write_curves_csv(const EvalReport& report,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "class,mode,threshold,precision,recall\n";
  char buf[160];
  for (const auto& [mode, curves] : report.curves) {
    for (const auto& [cls, curve] : curves) {
      for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%.9g,%.9g\n",
                      to_string(cls), to_string(mode), p.score_threshold,
                      p.precision, p.recall);
        out << buf;
      }
    }
  }
}

EvalReport load_curves_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line != "class,mode,threshold,precision,recall") {
    throw ValidationError("unexpected curve CSV header in " + path.string());
  }

  std::map<std::pair<EvalMode, ThreatClass>, PRCurve> curves;
  std::vector<std::pair<EvalMode, ThreatClass>> order;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cls_name, mode_name, field;
    if (!std::getline(row, cls_name, ',') ||
        !std::getline(row, mode_name, ',')) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": short row");
    }
    const ThreatClass cls = threat_class_from_string(cls_name);
    EvalMode mode;
    if (mode_name == "single") {
      mode = EvalMode::Single;
    } else if (mode_name == "fused") {
      mode = EvalMode::Fused;
    } else {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": unknown mode \"" + mode_name + "\"");
    }
    PRPoint p;
    double* fields[3] = {&p.score_threshold, &p.precision, &p.recall};
    for (double* f : fields) {
      if (!std::getline(row, field, ',')) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": short row");
      }
      *f = std::strtod(field.c_str(), nullptr);
    }
    auto key = std::make_pair(mode, cls);
    if (curves.find(key) == curves.end()) {
      order.push_back(key);
      curves[key].class_id = cls;
    }
    curves[key].points.push_back(p);
  }

  EvalReport report;
  for (const auto& key : order) {
    PRCurve& curve = curves[key];
    curve.ap = average_precision(curve);
    auto it = std::find_if(report.curves.begin(), report.curves.end(),
                           [&](const auto& entry) {
                             return entry.first == key.first;
                           });
    if (it == report.curves.end()) {
      report.curves.emplace_back(key.first,
                                 std::map<ThreatClass, PRCurve>{});
      it = std::prev(report.curves.end());
    }
    it->second.emplace(key.second, std::move(curve));
  }
  return report;
}

void write_curves_svg(const EvalReport& report,
                      const std::filesystem::path& path) {
  std::vector<PlotSeries> series;
  for (const auto& [mode, curves] : report.curves) {
    for (const auto& [cls, curve] : curves) {
      series.push_back({std::string(to_string(cls)) + " (" +
                            to_string(mode) + ")",
                        curve});
    }
  }
  write_pr_svg(series, path);
}

}  // namespace dualview
