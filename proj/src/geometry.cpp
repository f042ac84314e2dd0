#include "dualview/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace dualview {

const char* to_string(ThreatClass c) {
  switch (c) {
    case ThreatClass::Sharps:
      return "sharps";
    case ThreatClass::Blunts:
      return "blunts";
    case ThreatClass::Firearms:
      return "firearms";
    case ThreatClass::Lags:
      return "lags";
  }
  return "unknown";
}

ThreatClass threat_class_from_string(std::string_view name) {
  for (ThreatClass c : kAllClasses) {
    if (name == to_string(c)) return c;
  }
  throw ValidationError("unknown threat class: \"" + std::string(name) +
                        "\" (expected sharps|blunts|firearms|lags)");
}

const char* to_string(View v) {
  return v == View::Top ? "top" : "side";
}

View view_from_string(std::string_view name) {
  if (name == "top") return View::Top;
  if (name == "side") return View::Side;
  throw ValidationError("unknown view: \"" + std::string(name) +
                        "\" (expected top|side)");
}

Box::Box(double cx, double cy, double w, double h)
    : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(w) || !std::isfinite(h) ||
      !std::isfinite(cx) || !std::isfinite(cy)) {
    throw ValidationError("degenerate box: w and h must be finite and > 0");
  }
}

namespace {

double interval_overlap(double lo_a, double hi_a, double lo_b, double hi_b) {
  return std::min(hi_a, hi_b) - std::max(lo_a, lo_b);
}

}  // namespace

double iou(const Box& a, const Box& b) {
  const double iw = interval_overlap(a.left(), a.right(), b.left(), b.right());
  if (iw <= 0.0) return 0.0;
  const double ih = interval_overlap(a.top(), a.bottom(), b.top(), b.bottom());
  if (ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

Detection::Detection(Box box_in, ThreatClass class_id_in, double score_in,
                     View view_in, std::string scan_id_in)
    : box(box_in),
      class_id(class_id_in),
      score(score_in),
      view(view_in),
      scan_id(std::move(scan_id_in)) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw ValidationError("detection score must lie in [0, 1]");
  }
}

bool score_order(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::make_tuple(a.class_id, a.box.cx(), a.box.cy(), a.box.w(),
                         a.box.h()) <
         std::make_tuple(b.class_id, b.box.cx(), b.box.cy(), b.box.w(),
                         b.box.h());
}

std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ValidationError("nms iou_threshold must lie in (0, 1)");
  }
  std::sort(dets.begin(), dets.end(), score_order);

  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (const Detection& d : dets) {
    bool suppressed = false;
    for (const Detection& k : kept) {
      if (k.class_id == d.class_id && iou(k.box, d.box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

}  // namespace dualview
