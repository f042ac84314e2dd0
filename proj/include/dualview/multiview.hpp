#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dualview/metrics.hpp"

namespace dualview {

// One physical object, reassembled from its per-view ground-truth instances.
// best_score is the highest score of any detection matched to any of its
// instances, or absent when no view detected it.
struct FusedObject {
  std::string scan_id;
  std::string object_id;
  ThreatClass class_id;
  std::vector<GroundTruthObject> view_instances;
  std::optional<double> best_score;
};

struct FusedEvaluation {
  // One curve per class that has at least one physical object.
  std::map<ThreatClass, PRCurve> curves;
  std::map<ThreatClass, std::vector<FusedObject>> objects;
  // Scores of per-view false positives, pooled across views per class.
  std::map<ThreatClass, std::vector<double>> false_positive_scores;
};

// Groups ground truths by (scan_id, object_id) and checks that every
// instance of an object carries the same class.
std::vector<FusedObject> fuse_objects(const std::vector<GroundTruthObject>& gts);

// Object-level evaluation across views: a physical object is a true positive
// at threshold t when any of its view instances has a matching detection
// scoring >= t, counted once and credited at its best score. False positives
// accumulate over views. The recall denominator is physical objects, not
// view instances.
FusedEvaluation fuse_evaluation(const std::vector<Detection>& dets,
                                const std::vector<GroundTruthObject>& gts,
                                double iou_threshold);

}  // namespace dualview
