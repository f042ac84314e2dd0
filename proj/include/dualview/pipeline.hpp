#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dualview/dataset.hpp"
#include "dualview/detector.hpp"
#include "dualview/multiview.hpp"

namespace dualview {

struct LatencyReport {
  std::vector<double> per_scan_seconds;  // one entry per bag-scan (two views)
  double mean_seconds = 0.0;
  double median_seconds = 0.0;
  double p95_seconds = 0.0;
  double budget_seconds = 0.0;
  bool pass = false;  // p95 <= budget
  std::vector<std::string> errors;
};

struct PipelineResult {
  std::vector<Detection> detections;  // strictly above the display threshold
  LatencyReport latency;
};

// Streams scans bag by bag (both views of a scan before the next), timing
// only the detector call. A missing or unreadable image is recorded as a
// per-scan error and processing continues.
PipelineResult run_pipeline(const std::vector<ScanAnnotation>& annos,
                            const std::filesystem::path& images_dir,
                            const Detector& detector,
                            double display_threshold, double budget_seconds);

void write_latency_json(const LatencyReport&, const std::filesystem::path&);

enum class EvalMode { Single, Fused };

const char* to_string(EvalMode);

struct EvalReport {
  // Curves per requested mode, for every class with ground truth.
  std::vector<std::pair<EvalMode, std::map<ThreatClass, PRCurve>>> curves;
  std::vector<ThreatClass> skipped;  // classes with no ground truth anywhere
};

EvalReport evaluate_detections(const std::vector<ScanAnnotation>& annos,
                               const std::vector<Detection>& dets,
                               const std::vector<EvalMode>& modes,
                               double iou_threshold);

// Per-class AP table with a final mAP row, one column per mode.
void write_ap_table(std::ostream&, const EvalReport&);

// Combined CSV: class,mode,threshold,precision,recall (9 significant
// digits), fused and single-view curves side by side.
void write_curves_csv(const EvalReport&, const std::filesystem::path&);
EvalReport load_curves_csv(const std::filesystem::path&);

void write_curves_svg(const EvalReport&, const std::filesystem::path&);

}  // namespace dualview
