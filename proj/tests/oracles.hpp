// Independent reference implementations the test suites check the library
// against. Everything here is deliberately brute force and kept separate
// from the code under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dualview/geometry.hpp"
#include "dualview/metrics.hpp"
#include "dualview/rng.hpp"

namespace dualview::testing {

// --- rasterized IoU ---------------------------------------------------------

// Counts grid-cell centers falling inside [lo, hi) along one axis.
inline long count_cells_1d(double lo, double hi, double step) {
  long count = 0;
  const long first = static_cast<long>(std::floor(lo / step)) - 2;
  const long last = static_cast<long>(std::ceil(hi / step)) + 2;
  for (long i = first; i <= last; ++i) {
    const double center = (static_cast<double>(i) + 0.5) * step;
    if (center >= lo && center < hi) ++count;
  }
  return count;
}

// Rasterization on a square grid of the given pitch. Cell membership is
// separable for axis-aligned boxes, so the 2-D cell count is the product of
// per-axis counts; raster_iou_2d below verifies that equivalence directly.
inline double raster_iou(const Box& a, const Box& b, double step = 0.01) {
  const long ax = count_cells_1d(a.left(), a.right(), step);
  const long ay = count_cells_1d(a.top(), a.bottom(), step);
  const long bx = count_cells_1d(b.left(), b.right(), step);
  const long by = count_cells_1d(b.top(), b.bottom(), step);
  const long ix = count_cells_1d(std::max(a.left(), b.left()),
                                 std::min(a.right(), b.right()), step);
  const long iy = count_cells_1d(std::max(a.top(), b.top()),
                                 std::min(a.bottom(), b.bottom()), step);
  const double inter = static_cast<double>(ix) * static_cast<double>(iy);
  const double uni = static_cast<double>(ax) * static_cast<double>(ay) +
                     static_cast<double>(bx) * static_cast<double>(by) - inter;
  return uni <= 0.0 ? 0.0 : inter / uni;
}

// Full nested-loop rasterization, used to validate raster_iou itself on a
// few pairs (too slow for large sweeps).
inline double raster_iou_2d(const Box& a, const Box& b, double step = 0.05) {
  const double lo_x = std::min(a.left(), b.left());
  const double hi_x = std::max(a.right(), b.right());
  const double lo_y = std::min(a.top(), b.top());
  const double hi_y = std::max(a.bottom(), b.bottom());
  long in_a = 0, in_b = 0, in_both = 0;
  const long fx = static_cast<long>(std::floor(lo_x / step)) - 2;
  const long lx = static_cast<long>(std::ceil(hi_x / step)) + 2;
  const long fy = static_cast<long>(std::floor(lo_y / step)) - 2;
  const long ly = static_cast<long>(std::ceil(hi_y / step)) + 2;
  for (long iy = fy; iy <= ly; ++iy) {
    const double cy = (static_cast<double>(iy) + 0.5) * step;
    for (long ix = fx; ix <= lx; ++ix) {
      const double cx = (static_cast<double>(ix) + 0.5) * step;
      const bool inside_a = cx >= a.left() && cx < a.right() &&
                            cy >= a.top() && cy < a.bottom();
      const bool inside_b = cx >= b.left() && cx < b.right() &&
                            cy >= b.top() && cy < b.bottom();
      in_a += inside_a;
      in_b += inside_b;
      in_both += inside_a && inside_b;
    }
  }
  const double uni = static_cast<double>(in_a + in_b - in_both);
  return uni <= 0.0 ? 0.0 : static_cast<double>(in_both) / uni;
}

// --- exhaustive NMS ---------------------------------------------------------

// The unique subset where every removed detection overlaps (IoU above the
// threshold) a kept same-class detection ranked higher, and no kept pair
// overlaps that much. Found by checking all 2^n subsets.
inline std::vector<Detection> exhaustive_nms(std::vector<Detection> dets,
                                             double threshold) {
  std::sort(dets.begin(), dets.end(), score_order);
  const std::size_t n = dets.size();
  std::vector<Detection> found;
  int solutions = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    bool valid = true;
    for (std::size_t i = 0; i < n && valid; ++i) {
      const bool kept_i = mask & (std::size_t{1} << i);
      if (kept_i) {
        for (std::size_t j = 0; j < i && valid; ++j) {
          const bool kept_j = mask & (std::size_t{1} << j);
          if (kept_j && dets[j].class_id == dets[i].class_id &&
              iou(dets[j].box, dets[i].box) > threshold) {
            valid = false;
          }
        }
      } else {
        bool suppressed = false;
        for (std::size_t j = 0; j < i; ++j) {
          const bool kept_j = mask & (std::size_t{1} << j);
          if (kept_j && dets[j].class_id == dets[i].class_id &&
              iou(dets[j].box, dets[i].box) > threshold) {
            suppressed = true;
          }
        }
        if (!suppressed) valid = false;
      }
    }
    if (valid) {
      ++solutions;
      found.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::size_t{1} << i)) found.push_back(dets[i]);
      }
    }
  }
  if (solutions != 1) {
    throw std::logic_error("exhaustive_nms: expected a unique solution");
  }
  return found;
}

// --- brute-force matching / PR / AP -----------------------------------------

struct OracleCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// Greedy-by-score matching recoded from scratch for one (scan, view) slice.
inline OracleCounts oracle_match(const std::vector<Detection>& dets,
                                 const std::vector<GroundTruthObject>& gts,
                                 double threshold) {
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score_order(dets[a], dets[b]);
  });
  std::vector<bool> used(gts.size(), false);
  OracleCounts counts;
  for (std::size_t di : order) {
    std::size_t best = gts.size();
    double best_iou = -1.0;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (used[gi] || gts[gi].class_id != dets[di].class_id) continue;
      const double ov = iou(dets[di].box, gts[gi].box);
      if (ov < threshold) continue;
      const auto key = [&](const GroundTruthObject& g) {
        return std::make_tuple(g.box.cx(), g.box.cy(), g.box.w(), g.box.h(),
                               g.object_id);
      };
      if (best == gts.size() || ov > best_iou ||
          (ov == best_iou && key(gts[gi]) < key(gts[best]))) {
        best = gi;
        best_iou = ov;
      }
    }
    if (best < gts.size()) {
      used[best] = true;
      ++counts.tp;
    } else {
      ++counts.fp;
    }
  }
  for (std::size_t gi = 0; gi < gts.size(); ++gi) {
    if (!used[gi]) ++counts.fn;
  }
  return counts;
}

struct OraclePrPoint {
  double threshold;
  double precision;
  double recall;
};

// Threshold enumeration over one class: re-filter and re-match the surviving
// detections at every distinct score, grouped per (scan, view).
inline std::vector<OraclePrPoint> oracle_pr_points(
    const std::vector<Detection>& dets,
    const std::vector<GroundTruthObject>& gts, ThreatClass cls,
    double iou_threshold) {
  using Key = std::pair<std::string, int>;
  std::map<Key, std::vector<Detection>> class_dets;
  std::map<Key, std::vector<GroundTruthObject>> class_gts;
  std::size_t total_gt = 0;
  for (const auto& d : dets) {
    if (d.class_id == cls) {
      class_dets[{d.scan_id, static_cast<int>(d.view)}].push_back(d);
    }
  }
  for (const auto& g : gts) {
    if (g.class_id == cls) {
      class_gts[{g.scan_id, static_cast<int>(g.view)}].push_back(g);
      ++total_gt;
    }
  }
  std::set<Key> keys;
  for (const auto& [k, v] : class_dets) keys.insert(k);
  for (const auto& [k, v] : class_gts) keys.insert(k);

  std::set<double, std::greater<double>> thresholds;
  for (const auto& [k, group] : class_dets) {
    for (const auto& d : group) thresholds.insert(d.score);
  }
  std::vector<double> sweep = {std::numeric_limits<double>::infinity()};
  sweep.insert(sweep.end(), thresholds.begin(), thresholds.end());

  std::vector<OraclePrPoint> points;
  for (double t : sweep) {
    std::size_t tp = 0, fp = 0;
    for (const auto& key : keys) {
      std::vector<Detection> surviving;
      if (auto it = class_dets.find(key); it != class_dets.end()) {
        for (const auto& d : it->second) {
          if (d.score >= t) surviving.push_back(d);
        }
      }
      static const std::vector<GroundTruthObject> kEmpty;
      const auto git = class_gts.find(key);
      const OracleCounts counts = oracle_match(
          surviving, git == class_gts.end() ? kEmpty : git->second,
          iou_threshold);
      tp += counts.tp;
      fp += counts.fp;
    }
    const double precision =
        tp + fp == 0 ? 1.0
                     : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = total_gt == 0
                              ? 1.0
                              : static_cast<double>(tp) /
                                    static_cast<double>(total_gt);
    points.push_back({t, precision, recall});
  }
  return points;
}

// Exact area under the precision envelope; the envelope precision at each
// point is recomputed by a full scan rather than a suffix pass.
inline double oracle_ap(std::vector<OraclePrPoint> points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const OraclePrPoint& a, const OraclePrPoint& b) {
                     return a.recall < b.recall;
                   });
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double envelope = 0.0;
    for (const auto& q : points) {
      if (q.recall >= points[i].recall) {
        envelope = std::max(envelope, q.precision);
      }
    }
    ap += (points[i].recall - prev_recall) * envelope;
    prev_recall = points[i].recall;
  }
  return ap;
}

// --- random instance generators ---------------------------------------------

// Random single-class evaluation instance: ground truths on a loose grid,
// detections that are jittered copies (straddling the IoU threshold) mixed
// with far-away false positives. Scores are drawn from a coarse lattice so
// ties occur.
struct MetricsInstance {
  std::vector<Detection> dets;
  std::vector<GroundTruthObject> gts;
};

inline double lattice_score(Rng& rng) {
  return static_cast<double>(uniform_index(rng, 64)) / 70.0 + 0.05;
}

inline MetricsInstance random_metrics_instance(Rng& rng, ThreatClass cls,
                                               std::size_t max_gts,
                                               std::size_t max_dets) {
  MetricsInstance inst;
  const std::size_t n_gts = uniform_index(rng, max_gts + 1);
  const std::size_t n_scans = 1 + uniform_index(rng, 2);
  for (std::size_t i = 0; i < n_gts; ++i) {
    const std::string scan = "s" + std::to_string(uniform_index(rng, n_scans));
    const View view = uniform_index(rng, 2) == 0 ? View::Top : View::Side;
    const double cx = 15.0 + 30.0 * static_cast<double>(i % 4);
    const double cy = 15.0 + 30.0 * static_cast<double>(i / 4);
    inst.gts.push_back({Box(cx, cy, uniform_range(rng, 8.0, 20.0),
                            uniform_range(rng, 8.0, 20.0)),
                        cls, "g" + std::to_string(i), view, scan});
  }
  const std::size_t n_dets = uniform_index(rng, max_dets + 1);
  for (std::size_t i = 0; i < n_dets; ++i) {
    if (!inst.gts.empty() && uniform_double(rng) < 0.6) {
      const auto& gt = inst.gts[uniform_index(rng, inst.gts.size())];
      inst.dets.push_back(
          {Box(gt.box.cx() + uniform_range(rng, -1.5, 1.5),
               gt.box.cy() + uniform_range(rng, -1.5, 1.5), gt.box.w(),
               gt.box.h()),
           cls, lattice_score(rng), gt.view, gt.scan_id});
    } else {
      const std::string scan =
          "s" + std::to_string(uniform_index(rng, n_scans));
      const View view = uniform_index(rng, 2) == 0 ? View::Top : View::Side;
      inst.dets.push_back(
          {Box(uniform_range(rng, 200.0, 400.0),
               uniform_range(rng, 200.0, 400.0), uniform_range(rng, 5.0, 15.0),
               uniform_range(rng, 5.0, 15.0)),
           cls, lattice_score(rng), view, scan});
    }
  }
  return inst;
}

}  // namespace dualview::testing
