#include "dualview/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <tuple>

#include <json.hpp>

#include "dualview/errors.hpp"
#include "dualview/rng.hpp"

namespace dualview {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void line_error(const std::filesystem::path& path, std::size_t line,
                             const std::string& message) {
  throw ValidationError(path.string() + ":" + std::to_string(line) + ": " +
                        message);
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

double require_number(const json& rec, const char* key,
                      const std::filesystem::path& path, std::size_t line) {
  if (!rec.contains(key) || !rec[key].is_number()) {
    line_error(path, line, std::string("missing or non-numeric field \"") +
                               key + "\"");
  }
  return rec[key].get<double>();
}

std::string require_string(const json& rec, const char* key,
                           const std::filesystem::path& path,
                           std::size_t line) {
  if (!rec.contains(key) || !rec[key].is_string()) {
    line_error(path, line,
               std::string("missing or non-string field \"") + key + "\"");
  }
  return rec[key].get<std::string>();
}

struct RecordHeader {
  std::string scan_id;
  std::string bag_id;
  View view;
  int image_w;
  int image_h;
};

RecordHeader parse_header(const json& rec, const std::filesystem::path& path,
                          std::size_t line) {
  RecordHeader h;
  h.scan_id = require_string(rec, "scan_id", path, line);
  h.bag_id = require_string(rec, "bag_id", path, line);
  const std::string view_name = require_string(rec, "view", path, line);
  try {
    h.view = view_from_string(view_name);
  } catch (const ValidationError& e) {
    line_error(path, line, e.what());
  }
  h.image_w = static_cast<int>(require_number(rec, "image_w", path, line));
  h.image_h = static_cast<int>(require_number(rec, "image_h", path, line));
  if (h.image_w <= 0 || h.image_h <= 0) {
    line_error(path, line, "image_w and image_h must be positive");
  }
  return h;
}

Box parse_box(const json& entry, const RecordHeader& h,
              const std::filesystem::path& path, std::size_t line) {
  const double cx = require_number(entry, "cx", path, line);
  const double cy = require_number(entry, "cy", path, line);
  const double w = require_number(entry, "w", path, line);
  const double h_ = require_number(entry, "h", path, line);
  if (!(w > 0.0) || !(h_ > 0.0)) {
    line_error(path, line, "box w and h must be > 0");
  }
  Box box(cx, cy, w, h_);
  if (box.left() < 0.0 || box.top() < 0.0 || box.right() > h.image_w ||
      box.bottom() > h.image_h) {
    line_error(path, line, "box extends outside the image");
  }
  return box;
}

ordered_json box_to_json(const Box& box) {
  ordered_json j;
  j["cx"] = round3(box.cx());
  j["cy"] = round3(box.cy());
  j["w"] = round3(box.w());
  j["h"] = round3(box.h());
  return j;
}

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, const json&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      line_error(path, line_no, "malformed JSON record");
    }
    fn(line_no, rec);
  }
}

}  // namespace

std::vector<ScanAnnotation> load_annotations(
    const std::filesystem::path& path) {
  std::vector<ScanAnnotation> annos;
  std::set<std::pair<std::string, View>> seen;
  std::map<std::string, std::string> bag_of_scan;

  for_each_line(path, [&](std::size_t line_no, const json& rec) {
    const RecordHeader h = parse_header(rec, path, line_no);
    if (!seen.insert({h.scan_id, h.view}).second) {
      line_error(path, line_no, "duplicate annotation for scan \"" +
                                    h.scan_id + "\" view " +
                                    to_string(h.view));
    }
    if (auto it = bag_of_scan.find(h.scan_id); it != bag_of_scan.end()) {
      if (it->second != h.bag_id) {
        line_error(path, line_no,
                   "scan \"" + h.scan_id + "\" maps to two bag ids");
      }
    } else {
      bag_of_scan[h.scan_id] = h.bag_id;
    }

    ScanAnnotation anno;
    anno.scan_id = h.scan_id;
    anno.bag_id = h.bag_id;
    anno.view = h.view;
    anno.image_w = h.image_w;
    anno.image_h = h.image_h;
    if (rec.contains("image_path")) {
      anno.image_path = rec["image_path"].get<std::string>();
    }
    if (!rec.contains("objects") || !rec["objects"].is_array()) {
      line_error(path, line_no, "missing \"objects\" array");
    }
    std::set<std::string> ids;
    for (const auto& entry : rec["objects"]) {
      GroundTruthObject gt{parse_box(entry, h, path, line_no),
                           ThreatClass::Sharps,
                           require_string(entry, "object_id", path, line_no),
                           h.view, h.scan_id};
      const std::string class_name =
          require_string(entry, "class", path, line_no);
      try {
        gt.class_id = threat_class_from_string(class_name);
      } catch (const ValidationError& e) {
        line_error(path, line_no, e.what());
      }
      if (!ids.insert(gt.object_id).second) {
        line_error(path, line_no,
                   "duplicate object_id \"" + gt.object_id + "\"");
      }
      anno.objects.push_back(std::move(gt));
    }
    annos.push_back(std::move(anno));
  });
  return annos;
}

void save_annotations(const std::vector<ScanAnnotation>& annos,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& anno : annos) {
    ordered_json rec;
    rec["scan_id"] = anno.scan_id;
    rec["bag_id"] = anno.bag_id;
    rec["view"] = to_string(anno.view);
    rec["image_w"] = anno.image_w;
    rec["image_h"] = anno.image_h;
    if (!anno.image_path.empty()) rec["image_path"] = anno.image_path;
    rec["objects"] = ordered_json::array();
    for (const auto& gt : anno.objects) {
      ordered_json entry;
      entry["object_id"] = gt.object_id;
      entry["class"] = to_string(gt.class_id);
      entry.update(box_to_json(gt.box));
      rec["objects"].push_back(std::move(entry));
    }
    out << rec.dump() << '\n';
  }
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
  std::vector<Detection> dets;
  for_each_line(path, [&](std::size_t line_no, const json& rec) {
    const RecordHeader h = parse_header(rec, path, line_no);
    if (!rec.contains("objects") || !rec["objects"].is_array()) {
      line_error(path, line_no, "missing \"objects\" array");
    }
    for (const auto& entry : rec["objects"]) {
      const double score = require_number(entry, "score", path, line_no);
      const Box box = parse_box(entry, h, path, line_no);
      ThreatClass cls;
      try {
        cls = threat_class_from_string(
            require_string(entry, "class", path, line_no));
      } catch (const ValidationError& e) {
        line_error(path, line_no, e.what());
      }
      if (!(score >= 0.0 && score <= 1.0)) {
        line_error(path, line_no, "score must lie in [0, 1]");
      }
      dets.emplace_back(box, cls, score, h.view, h.scan_id);
    }
  });
  return dets;
}

void save_detections(const std::vector<Detection>& dets,
                     const std::vector<ScanAnnotation>& annos,
                     const std::filesystem::path& path) {
  std::map<std::pair<std::string, View>, const ScanAnnotation*> meta;
  for (const auto& anno : annos) meta[{anno.scan_id, anno.view}] = &anno;

  std::map<std::pair<std::string, View>, std::vector<const Detection*>>
      grouped;
  for (const auto& det : dets) {
    if (meta.find({det.scan_id, det.view}) == meta.end()) {
      throw ValidationError("detection references unknown scan \"" +
                            det.scan_id + "\" view " + to_string(det.view));
    }
    grouped[{det.scan_id, det.view}].push_back(&det);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  // One record per annotated (scan, view), even when it has no detections,
  // so downstream consumers see the full scan list.
  for (const auto& anno : annos) {
    ordered_json rec;
    rec["scan_id"] = anno.scan_id;
    rec["bag_id"] = anno.bag_id;
    rec["view"] = to_string(anno.view);
    rec["image_w"] = anno.image_w;
    rec["image_h"] = anno.image_h;
    rec["objects"] = ordered_json::array();
    if (auto it = grouped.find({anno.scan_id, anno.view});
        it != grouped.end()) {
      std::vector<const Detection*> ordered = it->second;
      std::sort(ordered.begin(), ordered.end(),
                [](const Detection* a, const Detection* b) {
                  return score_order(*a, *b);
                });
      for (const Detection* det : ordered) {
        ordered_json entry;
        entry["class"] = to_string(det->class_id);
        entry.update(box_to_json(det->box));
        entry["score"] = round3(det->score);
        rec["objects"].push_back(std::move(entry));
      }
    }
    out << rec.dump() << '\n';
  }
}

DatasetSplit split_dataset(const std::vector<ScanAnnotation>& annos,
                           const SplitFractions& fractions, std::uint64_t seed,
                           SplitGroupBy group_by) {
  if (!(fractions.train > 0.0) || !(fractions.validation > 0.0) ||
      !(fractions.test > 0.0)) {
    throw ValidationError("split fractions must be positive");
  }
  if (std::abs(fractions.train + fractions.validation + fractions.test - 1.0) >
      1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }

  // Unit ids in sorted order so the shuffle alone decides the outcome.
  std::map<std::string, std::vector<std::string>> scans_of_unit;
  std::set<std::string> scan_ids;
  for (const auto& anno : annos) {
    const std::string& unit =
        group_by == SplitGroupBy::Bag ? anno.bag_id : anno.scan_id;
    if (scan_ids.insert(anno.scan_id).second) {
      scans_of_unit[unit].push_back(anno.scan_id);
    }
  }
  if (scan_ids.size() < 3) {
    throw ValidationError("split requires at least 3 bag-scans");
  }

  std::vector<std::string> units;
  units.reserve(scans_of_unit.size());
  for (const auto& [unit, scans] : scans_of_unit) units.push_back(unit);

  Rng rng(seed);
  shuffle_in_place(units, rng);

  const std::size_t n = units.size();
  const std::array<double, 3> fr = {fractions.train, fractions.validation,
                                    fractions.test};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = fr[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(exact);
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainder[i] > remainder[best]) best = i;
    }
    ++counts[best];
    remainder[best] = -1.0;
    ++assigned;
  }

  DatasetSplit split;
  std::array<std::set<std::string>*, 3> subsets = {&split.train,
                                                   &split.validation,
                                                   &split.test};
  std::size_t index = 0;
  for (int part = 0; part < 3; ++part) {
    for (std::size_t j = 0; j < counts[part]; ++j, ++index) {
      for (const auto& scan : scans_of_unit[units[index]]) {
        subsets[part]->insert(scan);
      }
    }
  }
  return split;
}

void save_split(const DatasetSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  ordered_json j;
  j["train"] = split.train;
  j["validation"] = split.validation;
  j["test"] = split.test;
  out << j.dump(2) << '\n';
}

}  // namespace dualview
