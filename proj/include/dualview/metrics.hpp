#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dualview/geometry.hpp"

namespace dualview {

// Annotated object in one view. object_id is shared by the instances of the
// same physical object across views; (scan_id, view, object_id) is unique.
struct GroundTruthObject {
  Box box;
  ThreatClass class_id;
  std::string object_id;
  View view;
  std::string scan_id;
};

struct MatchResult {
  std::vector<std::pair<Detection, GroundTruthObject>> true_positives;
  std::vector<Detection> false_positives;
  std::vector<GroundTruthObject> false_negatives;
};

// Greedy detection-to-ground-truth assignment for a single (scan, view).
// Detections are visited in score_order; each becomes a true positive iff an
// unmatched ground truth of the same class overlaps it with IoU >=
// iou_threshold (the highest-IoU candidate is consumed). Everything else is a
// false positive; leftover ground truths are false negatives.
// Mixing detections or ground truths from different (scan, view) pairs is a
// contract violation.
MatchResult match(const std::vector<Detection>& dets,
                  const std::vector<GroundTruthObject>& gts,
                  double iou_threshold);

// precision = tp/(tp+fp), recall = tp/(tp+fn); an empty denominator counts
// as perfect (1.0) so curves stay well defined at recall 0.
std::pair<double, double> precision_recall(std::size_t tp, std::size_t fp,
                                           std::size_t fn);

struct PRPoint {
  double score_threshold;  // +infinity marks the "no detections pass" anchor
  double precision;
  double recall;
};

struct PRCurve {
  ThreatClass class_id;
  std::vector<PRPoint> points;  // descending threshold, ascending recall
  double ap = 0.0;
};

// Precision/recall for one class swept over every distinct detection score
// (plus an anchor above the maximum, where recall is 0). Detections and
// ground truths may span many scans and views; matching runs independently
// per (scan, view) and the counts are aggregated. Throws if no ground truth
// of class_id exists anywhere: recall would be undefined.
PRCurve pr_curve(const std::vector<Detection>& dets,
                 const std::vector<GroundTruthObject>& gts,
                 ThreatClass class_id, double iou_threshold);

enum class ApInterpolation {
  AllPoints,    // exact area under the precision envelope
  ElevenPoint,  // mean envelope precision at recall 0.0, 0.1, ..., 1.0
};

double average_precision(const PRCurve& curve,
                         ApInterpolation interp = ApInterpolation::AllPoints);

// Unweighted mean over classes; empty input is an error.
double mean_ap(const std::map<ThreatClass, double>& aps);

// CSV with header "threshold,precision,recall", one row per point,
// 9 significant digits.
void write_pr_csv(const PRCurve& curve, std::ostream& out);
void write_pr_csv(const PRCurve& curve, const std::string& path);

}  // namespace dualview
