#pragma once

#include <string>
#include <vector>

#include "dualview/geometry.hpp"
#include "dualview/image.hpp"

namespace dualview {

struct DetectorParams {
  double min_blob_area = 120.0;  // px^2, blobs below this are ignored

  // Score = purity_weight * hue purity + aspect_weight * aspect fit
  //       + area_weight * normalized area, clamped into (0, 1].
  double purity_weight = 0.5;
  double aspect_weight = 0.3;
  double area_weight = 0.2;
  double area_norm = 4000.0;  // px^2 mapped to normalized area 1.0

  double nms_iou = 0.5;
  double sharps_min_aspect = 3.0;   // blue and this elongated: a blade
  double firearm_max_fill = 0.80;   // blue, compact, hollow corner: a gun
  double lag_max_aspect = 3.2;      // orange and compact: a liquid
  double handle_min_aspect = 2.5;   // green neighbor that makes a hammer
  int adjacency_px = 3;

  void validate() const;
};

// Contract every detection source fulfils, so externally produced
// detections (via JSON-lines) and this heuristic are interchangeable in the
// pipeline.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(const ImageRgb8& image,
                                        const std::string& scan_id,
                                        View view) const = 0;
};

// Deterministic color-and-shape detector over the synthetic false-color
// imagery. Hue bands isolate material groups, 4-connected components give
// candidate blobs, and silhouette rules assign classes.
class HeuristicDetector : public Detector {
 public:
  explicit HeuristicDetector(DetectorParams params = {});

  std::vector<Detection> detect(const ImageRgb8& image,
                                const std::string& scan_id,
                                View view) const override;

  const DetectorParams& params() const { return params_; }

 private:
  DetectorParams params_;
};

}  // namespace dualview
