#include "dualview/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

void check_single_scan_view(const std::vector<Detection>& dets,
                            const std::vector<GroundTruthObject>& gts) {
  const std::string* scan = nullptr;
  const View* view = nullptr;
  auto check = [&](const std::string& s, const View& v) {
    if (scan == nullptr) {
      scan = &s;
      view = &v;
    } else if (s != *scan || v != *view) {
      throw ValidationError(
          "match() requires all detections and ground truths to share one "
          "(scan, view)");
    }
  };
  for (const auto& d : dets) check(d.scan_id, d.view);
  for (const auto& g : gts) check(g.scan_id, g.view);
}

bool gt_tie_order(const GroundTruthObject& a, const GroundTruthObject& b) {
  return std::make_tuple(a.box.cx(), a.box.cy(), a.box.w(), a.box.h(),
                         a.object_id) <
         std::make_tuple(b.box.cx(), b.box.cy(), b.box.w(), b.box.h(),
                         b.object_id);
}

}  // namespace

MatchResult match(const std::vector<Detection>& dets,
                  const std::vector<GroundTruthObject>& gts,
                  double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ValidationError("match iou_threshold must lie in (0, 1)");
  }
  check_single_scan_view(dets, gts);

  std::vector<Detection> ordered = dets;
  std::sort(ordered.begin(), ordered.end(), score_order);

  std::vector<bool> consumed(gts.size(), false);
  MatchResult result;
  for (const Detection& d : ordered) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      if (consumed[i] || gts[i].class_id != d.class_id) continue;
      const double ov = iou(d.box, gts[i].box);
      if (ov < iou_threshold) continue;
      if (best < 0 || ov > best_iou ||
          (ov == best_iou &&
           gt_tie_order(gts[i], gts[static_cast<std::size_t>(best)]))) {
        best = static_cast<int>(i);
        best_iou = ov;
      }
    }
    if (best >= 0) {
      consumed[static_cast<std::size_t>(best)] = true;
      result.true_positives.emplace_back(d,
                                         gts[static_cast<std::size_t>(best)]);
    } else {
      result.false_positives.push_back(d);
    }
  }
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (!consumed[i]) result.false_negatives.push_back(gts[i]);
  }
  return result;
}

std::pair<double, double> precision_recall(std::size_t tp, std::size_t fp,
                                           std::size_t fn) {
  const double precision =
      (tp + fp == 0) ? 1.0
                     : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall =
      (tp + fn == 0) ? 1.0
                     : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return {precision, recall};
}

namespace {

struct GroupKey {
  std::string scan_id;
  View view;
  bool operator<(const GroupKey& o) const {
    return std::tie(scan_id, view) < std::tie(o.scan_id, o.view);
  }
};

}  // namespace

PRCurve pr_curve(const std::vector<Detection>& dets,
                 const std::vector<GroundTruthObject>& gts,
                 ThreatClass class_id, double iou_threshold) {
  std::map<GroupKey, std::vector<Detection>> dets_by_group;
  std::map<GroupKey, std::vector<GroundTruthObject>> gts_by_group;
  std::size_t total_gt = 0;
  for (const auto& d : dets) {
    if (d.class_id == class_id) {
      dets_by_group[{d.scan_id, d.view}].push_back(d);
    }
  }
  for (const auto& g : gts) {
    if (g.class_id == class_id) {
      gts_by_group[{g.scan_id, g.view}].push_back(g);
      ++total_gt;
    }
  }
  if (total_gt == 0) {
    throw ValidationError(std::string("pr_curve: no ground truth of class ") +
                          to_string(class_id) +
                          "; recall denominator undefined");
  }

  std::set<double, std::greater<double>> thresholds;
  for (const auto& [key, group] : dets_by_group) {
    for (const auto& d : group) thresholds.insert(d.score);
  }

  std::set<GroupKey> keys;
  for (const auto& [key, group] : dets_by_group) keys.insert(key);
  for (const auto& [key, group] : gts_by_group) keys.insert(key);

  PRCurve curve;
  curve.class_id = class_id;

  auto add_point = [&](double threshold) {
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (const auto& key : keys) {
      std::vector<Detection> surviving;
      if (auto it = dets_by_group.find(key); it != dets_by_group.end()) {
        for (const auto& d : it->second) {
          if (d.score >= threshold) surviving.push_back(d);
        }
      }
      static const std::vector<GroundTruthObject> kNoGts;
      const auto git = gts_by_group.find(key);
      const auto& group_gts = git == gts_by_group.end() ? kNoGts : git->second;
      const MatchResult m = match(surviving, group_gts, iou_threshold);
      tp += m.true_positives.size();
      fp += m.false_positives.size();
    }
    const std::size_t fn = total_gt - tp;
    const auto [precision, recall] = precision_recall(tp, fp, fn);
    curve.points.push_back({threshold, precision, recall});
  };

  add_point(std::numeric_limits<double>::infinity());
  for (double t : thresholds) add_point(t);

  curve.ap = average_precision(curve);
  return curve;
}

namespace {

// Envelope precision at recall r: max precision among points whose recall
// is >= r, or 0 when the curve never reaches r.
double envelope_at(const std::vector<PRPoint>& points, double recall) {
  double best = 0.0;
  for (const auto& p : points) {
    if (p.recall >= recall) best = std::max(best, p.precision);
  }
  return best;
}

}  // namespace

double average_precision(const PRCurve& curve, ApInterpolation interp) {
  if (interp == ApInterpolation::ElevenPoint) {
    double sum = 0.0;
    for (int i = 0; i <= 10; ++i) {
      sum += envelope_at(curve.points, static_cast<double>(i) / 10.0);
    }
    return sum / 11.0;
  }

  std::vector<PRPoint> pts = curve.points;
  std::stable_sort(pts.begin(), pts.end(),
                   [](const PRPoint& a, const PRPoint& b) {
                     return a.recall < b.recall;
                   });
  // Suffix max turns the sawtooth into the monotone precision envelope.
  std::vector<double> env(pts.size());
  double running = 0.0;
  for (std::size_t i = pts.size(); i-- > 0;) {
    running = std::max(running, pts[i].precision);
    env[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ap += (pts[i].recall - prev_recall) * env[i];
    prev_recall = pts[i].recall;
  }
  return ap;
}

double mean_ap(const std::map<ThreatClass, double>& aps) {
  if (aps.empty()) {
    throw ValidationError("mean_ap requires at least one class");
  }
  double sum = 0.0;
  for (const auto& [cls, ap] : aps) sum += ap;
  return sum / static_cast<double>(aps.size());
}

void write_pr_csv(const PRCurve& curve, std::ostream& out) {
  out << "threshold,precision,recall\n";
  char buf[128];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", p.score_threshold,
                  p.precision, p.recall);
    out << buf;
  }
}

void write_pr_csv(const PRCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_pr_csv(curve, out);
}

}  // namespace dualview
