#pragma once

#include <cstdint>
#include <vector>

#include "dualview/geometry.hpp"

namespace dualview {

// Anchor grid recipe. Defaults are the conventional two-stage-detector
// settings for natural images; every field is overridable.
struct AnchorConfig {
  double base_size = 256.0;
  double stride = 16.0;
  std::vector<double> scales = {0.25, 0.5, 1.0, 2.0};
  std::vector<double> aspect_ratios = {0.5, 1.0, 2.0};  // w / h
};

struct BoxDims {
  double w = 0.0;
  double h = 0.0;
  friend bool operator==(const BoxDims&, const BoxDims&) = default;
};

struct TiledAnchor {
  Box box;
  bool crosses_border;  // extends past the image; flagged, never clipped
};

// One anchor per (grid cell, scale, aspect ratio), centered on cell centers.
// Anchor width is base*scale*sqrt(ratio), height base*scale/sqrt(ratio).
std::vector<TiledAnchor> tile_anchors(const AnchorConfig& config,
                                      double image_w, double image_h);

// IoU of two boxes sharing a center, a function of dimensions alone.
double dims_iou(const BoxDims& a, const BoxDims& b);

struct KMeansResult {
  std::vector<BoxDims> centroids;  // sorted by area, ascending
  double mean_iou = 0.0;           // mean best-IoU of boxes to centroids
  // Mean (1 - best IoU) after each accepted iteration, non-increasing.
  std::vector<double> objective_history;
  int iterations = 0;
};

// Lloyd-style clustering of box dimensions under the 1 - IoU distance, with
// per-cluster (w, h) means as the update step. An update that would worsen
// the objective is discarded and the run stops, so objective_history is
// non-increasing by construction. Deterministic given (dims, k, seed).
KMeansResult kmeans_anchors(const std::vector<BoxDims>& dims, std::size_t k,
                            std::uint64_t seed);

struct CoverageStats {
  double mean_iou = 0.0;
  double min_iou = 0.0;
  double frac_above_half = 0.0;  // fraction of dims with best IoU > 0.5
};

// How well a candidate anchor set covers a set of ground-truth dimensions,
// measured by each dimension's best co-centered IoU.
CoverageStats anchor_coverage(const std::vector<BoxDims>& candidates,
                              const std::vector<BoxDims>& dims);

}  // namespace dualview
