#include "dualview/multiview.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>

#include "dualview/errors.hpp"

namespace dualview {

std::vector<FusedObject> fuse_objects(
    const std::vector<GroundTruthObject>& gts) {
  std::map<std::pair<std::string, std::string>, FusedObject> grouped;
  for (const auto& g : gts) {
    auto key = std::make_pair(g.scan_id, g.object_id);
    auto it = grouped.find(key);
    if (it == grouped.end()) {
      FusedObject obj;
      obj.scan_id = g.scan_id;
      obj.object_id = g.object_id;
      obj.class_id = g.class_id;
      obj.view_instances.push_back(g);
      grouped.emplace(std::move(key), std::move(obj));
    } else {
      if (it->second.class_id != g.class_id) {
        throw ValidationError("object \"" + g.object_id + "\" in scan \"" +
                              g.scan_id +
                              "\" has inconsistent classes across views");
      }
      it->second.view_instances.push_back(g);
    }
  }
  std::vector<FusedObject> objects;
  objects.reserve(grouped.size());
  for (auto& [key, obj] : grouped) objects.push_back(std::move(obj));
  return objects;
}

FusedEvaluation fuse_evaluation(const std::vector<Detection>& dets,
                                const std::vector<GroundTruthObject>& gts,
                                double iou_threshold) {
  FusedEvaluation eval;

  std::vector<FusedObject> objects = fuse_objects(gts);

  // Per-view matching, exactly as in the single-view metrics.
  std::map<std::pair<std::string, View>, std::vector<Detection>> dets_by_group;
  std::map<std::pair<std::string, View>, std::vector<GroundTruthObject>>
      gts_by_group;
  for (const auto& d : dets) dets_by_group[{d.scan_id, d.view}].push_back(d);
  for (const auto& g : gts) gts_by_group[{g.scan_id, g.view}].push_back(g);
  std::set<std::pair<std::string, View>> keys;
  for (const auto& [key, group] : dets_by_group) keys.insert(key);
  for (const auto& [key, group] : gts_by_group) keys.insert(key);

  std::map<std::pair<std::string, std::string>, double> matched_best;
  for (const auto& key : keys) {
    static const std::vector<Detection> kNoDets;
    static const std::vector<GroundTruthObject> kNoGts;
    const auto dit = dets_by_group.find(key);
    const auto git = gts_by_group.find(key);
    const MatchResult m =
        match(dit == dets_by_group.end() ? kNoDets : dit->second,
              git == gts_by_group.end() ? kNoGts : git->second, iou_threshold);
    for (const auto& [det, gt] : m.true_positives) {
      auto obj_key = std::make_pair(gt.scan_id, gt.object_id);
      auto it = matched_best.find(obj_key);
      if (it == matched_best.end() || det.score > it->second) {
        matched_best[obj_key] = det.score;
      }
    }
    for (const auto& fp : m.false_positives) {
      eval.false_positive_scores[fp.class_id].push_back(fp.score);
    }
  }

  for (auto& obj : objects) {
    auto it = matched_best.find({obj.scan_id, obj.object_id});
    if (it != matched_best.end()) obj.best_score = it->second;
    eval.objects[obj.class_id].push_back(obj);
  }
  for (auto& [cls, scores] : eval.false_positive_scores) {
    std::sort(scores.begin(), scores.end(), std::greater<double>());
  }

  // Sweep the distinct scores of each class's detections, as in pr_curve.
  for (const auto& [cls, class_objects] : eval.objects) {
    std::set<double, std::greater<double>> thresholds;
    for (const auto& d : dets) {
      if (d.class_id == cls) thresholds.insert(d.score);
    }

    const std::size_t n_objects = class_objects.size();
    const std::vector<double>* fp_scores = nullptr;
    if (auto it = eval.false_positive_scores.find(cls);
        it != eval.false_positive_scores.end()) {
      fp_scores = &it->second;
    }

    PRCurve curve;
    curve.class_id = cls;
    auto add_point = [&](double threshold) {
      std::size_t tp = 0;
      for (const auto& obj : class_objects) {
        if (obj.best_score && *obj.best_score >= threshold) ++tp;
      }
      std::size_t fp = 0;
      if (fp_scores != nullptr) {
        for (double s : *fp_scores) {
          if (s >= threshold) ++fp;
        }
      }
      const auto [precision, recall] = precision_recall(tp, fp, n_objects - tp);
      curve.points.push_back({threshold, precision, recall});
    };
    add_point(std::numeric_limits<double>::infinity());
    for (double t : thresholds) add_point(t);
    curve.ap = average_precision(curve);
    eval.curves.emplace(cls, std::move(curve));
  }

  return eval;
}

}  // namespace dualview
