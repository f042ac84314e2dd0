#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "dualview/metrics.hpp"

namespace dualview {

// One view of one bag-scan: image metadata plus its ground-truth objects.
struct ScanAnnotation {
  std::string scan_id;
  std::string bag_id;
  View view = View::Top;
  int image_w = 0;
  int image_h = 0;
  std::string image_path;  // optional, empty when unset
  std::vector<GroundTruthObject> objects;
};

// JSON-lines, one view-annotation per line:
//   {"scan_id": ..., "bag_id": ..., "view": "top"|"side", "image_w": ...,
//    "image_h": ..., "objects": [{"object_id": ..., "class": ...,
//    "cx": ..., "cy": ..., "w": ..., "h": ...}]}
// Invariant violations are reported with the offending line number.
std::vector<ScanAnnotation> load_annotations(const std::filesystem::path&);
void save_annotations(const std::vector<ScanAnnotation>&,
                      const std::filesystem::path&);

// Detection files use the same record layout; object entries carry "score"
// instead of "object_id".
std::vector<Detection> load_detections(const std::filesystem::path&);
// Grouping metadata (bag_id, image size) is taken from the annotations;
// detections for a (scan, view) absent from them are rejected.
void save_detections(const std::vector<Detection>&,
                     const std::vector<ScanAnnotation>&,
                     const std::filesystem::path&);

struct SplitFractions {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
};

// Splitting unit: a bag-scan keeps the two views of one pass together; the
// bag option additionally keeps every re-scan of a bag together.
enum class SplitGroupBy { BagScan, Bag };

struct DatasetSplit {
  std::set<std::string> train;
  std::set<std::string> validation;
  std::set<std::string> test;  // all three hold scan_ids
};

// Deterministic seeded split. Subset sizes match the fractions to within one
// unit, and both views of a bag always land in the same subset.
DatasetSplit split_dataset(const std::vector<ScanAnnotation>& annos,
                           const SplitFractions& fractions, std::uint64_t seed,
                           SplitGroupBy group_by = SplitGroupBy::BagScan);

void save_split(const DatasetSplit&, const std::filesystem::path&);

}  // namespace dualview
