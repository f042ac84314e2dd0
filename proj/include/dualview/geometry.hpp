#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "dualview/errors.hpp"

namespace dualview {

// The four threat categories carried through the whole toolkit.
enum class ThreatClass { Sharps = 0, Blunts = 1, Firearms = 2, Lags = 3 };

inline constexpr std::array<ThreatClass, 4> kAllClasses = {
    ThreatClass::Sharps, ThreatClass::Blunts, ThreatClass::Firearms,
    ThreatClass::Lags};

const char* to_string(ThreatClass c);
ThreatClass threat_class_from_string(std::string_view name);

// Scanner views: one projection from above, one from the side.
enum class View { Top = 0, Side = 1 };

const char* to_string(View v);
View view_from_string(std::string_view name);

// Axis-aligned box stored as center plus dimensions, in pixels.
// Degenerate dimensions are rejected at construction rather than clamped.
class Box {
 public:
  Box(double cx, double cy, double w, double h);

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double w() const { return w_; }
  double h() const { return h_; }

  double left() const { return cx_ - w_ / 2.0; }
  double right() const { return cx_ + w_ / 2.0; }
  double top() const { return cy_ - h_ / 2.0; }
  double bottom() const { return cy_ + h_ / 2.0; }
  double area() const { return w_ * h_; }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  double cx_;
  double cy_;
  double w_;
  double h_;
};

// Intersection area over union area. Symmetric, 0 for disjoint boxes,
// exactly 1 for identical boxes.
double iou(const Box& a, const Box& b);

// A scored, classified box attributed to one view of one scan.
struct Detection {
  Detection(Box box, ThreatClass class_id, double score, View view,
            std::string scan_id);

  Box box;
  ThreatClass class_id;
  double score;  // in [0, 1]
  View view;
  std::string scan_id;
};

// Deterministic ordering used everywhere a score tie must be broken:
// descending score, then ascending (class_id, cx, cy, w, h).
bool score_order(const Detection& a, const Detection& b);

// Greedy per-class non-maximum suppression. A detection is suppressed when
// its IoU with an already-kept higher-ranked detection of the same class
// exceeds iou_threshold. Output is sorted by score_order.
std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold);

}  // namespace dualview
