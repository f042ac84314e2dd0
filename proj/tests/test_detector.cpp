#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "dualview/detector.hpp"
#include "dualview/rng.hpp"
#include "dualview/synth.hpp"

using namespace dualview;

namespace {

constexpr Material kSteel{7.8, 26.0};
constexpr Material kAluminium{2.7, 13.0};
constexpr Material kLiquid{1.05, 7.4};

SynthObject threat_object(ThreatClass cls) {
  SynthObject obj;
  obj.threat = cls;
  switch (cls) {
    case ThreatClass::Sharps:
      obj.parts.push_back(
          {{ShapeKind::Prism, 320, 200, 320, 2, 7, 70}, kSteel});
      break;
    case ThreatClass::Firearms:
      obj.parts.push_back(
          {{ShapeKind::Prism, 320, 200, 320, 12, 15, 70}, kSteel});
      obj.parts.push_back(
          {{ShapeKind::Prism, 360, 180, 270, 28, 30, 18}, kSteel});
      break;
    case ThreatClass::Blunts:
      obj.parts.push_back(
          {{ShapeKind::Prism, 320, 200, 260, 18, 18, 20}, kSteel});
      obj.parts.push_back(
          {{ShapeKind::Prism, 320, 200, 370, 8, 8, 90}, kAluminium});
      break;
    case ThreatClass::Lags:
      obj.parts.push_back(
          {{ShapeKind::CylinderY, 320, 200, 320, 35, 60, 35}, kLiquid});
      break;
  }
  return obj;
}

struct Rendered {
  ImageRgb8 top;
  ImageRgb8 side;
  std::vector<GroundTruthObject> top_gt;
  std::vector<GroundTruthObject> side_gt;
};

Rendered render_single(const SynthObject& obj, const std::string& scan_id) {
  SynthScene scene;
  scene.objects.push_back(obj);
  const AttenuationBands bands;
  auto [top, side] = render_views(scene, 1.0, bands, scan_id);
  Rendered out;
  out.top = false_color(top, bands).image;
  out.side = false_color(side, bands).image;
  out.top_gt = top.ground_truth;
  out.side_gt = side.ground_truth;
  return out;
}

ImageRgb8 blank(int w, int h) {
  ImageRgb8 image(w, h);
  std::fill(image.pixels.begin(), image.pixels.end(), std::uint8_t{255});
  return image;
}

}  // namespace

TEST_CASE("parameters are validated") {
  DetectorParams params;
  params.min_blob_area = 0.0;
  CHECK_THROWS_AS(HeuristicDetector{params}, ValidationError);
  params = {};
  params.nms_iou = 1.5;
  CHECK_THROWS_AS(HeuristicDetector{params}, ValidationError);
}

TEST_CASE("a blank image yields no detections") {
  const HeuristicDetector detector;
  CHECK(detector.detect(blank(64, 64), "s", View::Top).empty());
}

TEST_CASE("each threat silhouette is found in both views with its class") {
  const HeuristicDetector detector;
  for (ThreatClass cls : kAllClasses) {
    CAPTURE(to_string(cls));
    const Rendered rendered = render_single(threat_object(cls), "s0");

    const auto top_dets = detector.detect(rendered.top, "s0", View::Top);
    REQUIRE(top_dets.size() == 1);
    CHECK(top_dets[0].class_id == cls);
    REQUIRE(rendered.top_gt.size() == 1);
    CHECK(iou(top_dets[0].box, rendered.top_gt[0].box) >= 0.5);

    const auto side_dets = detector.detect(rendered.side, "s0", View::Side);
    REQUIRE(side_dets.size() == 1);
    CHECK(side_dets[0].class_id == cls);
    CHECK(iou(side_dets[0].box, rendered.side_gt[0].box) >= 0.5);

    CHECK(top_dets[0].score > 0.0);
    CHECK(top_dets[0].score <= 1.0);
  }
}

TEST_CASE("blobs below the minimum area are ignored") {
  // A 6x6 mm steel pellet projects to ~36 px, below the 120 px floor.
  SynthObject pellet;
  pellet.threat = ThreatClass::Firearms;
  pellet.parts.push_back({{ShapeKind::Prism, 320, 200, 320, 3, 3, 3}, kSteel});
  const Rendered rendered = render_single(pellet, "s0");
  const HeuristicDetector detector;
  CHECK(detector.detect(rendered.top, "s0", View::Top).empty());
}

TEST_CASE("identical images give identical detections") {
  const Rendered rendered =
      render_single(threat_object(ThreatClass::Firearms), "s0");
  const HeuristicDetector detector;
  const auto a = detector.detect(rendered.top, "s0", View::Top);
  const auto b = detector.detect(rendered.top, "s0", View::Top);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].box == b[i].box);
    CHECK(a[i].score == b[i].score);
    CHECK(a[i].class_id == b[i].class_id);
  }
}

TEST_CASE("whole-pixel scene shifts shift detections identically") {
  SynthObject base = threat_object(ThreatClass::Lags);
  SynthObject shifted = base;
  const double dx = 23.0;  // tunnel width axis: rows of the top view
  const double dz = 41.0;  // conveyor axis: columns of both views
  for (auto& part : shifted.parts) {
    part.shape.cx += dx;
    part.shape.cz += dz;
  }
  const Rendered a = render_single(base, "s0");
  const Rendered b = render_single(shifted, "s0");
  const HeuristicDetector detector;
  const auto dets_a = detector.detect(a.top, "s0", View::Top);
  const auto dets_b = detector.detect(b.top, "s0", View::Top);
  REQUIRE(dets_a.size() == 1);
  REQUIRE(dets_b.size() == 1);
  CHECK(dets_b[0].box.cx() == dets_a[0].box.cx() + dz);
  CHECK(dets_b[0].box.cy() == dets_a[0].box.cy() + dx);
  CHECK(dets_b[0].box.w() == dets_a[0].box.w());
  CHECK(dets_b[0].box.h() == dets_a[0].box.h());
  CHECK(dets_b[0].score == dets_a[0].score);
}

TEST_CASE("images off the expected colormap are rejected") {
  ImageRgb8 noise(64, 64);
  Rng rng(7);
  for (auto& byte : noise.pixels) {
    byte = static_cast<std::uint8_t>(uniform_index(rng, 256));
  }
  const HeuristicDetector detector;
  CHECK_THROWS_AS(detector.detect(noise, "s", View::Top), ValidationError);
  CHECK_THROWS_AS(detector.detect(ImageRgb8{}, "s", View::Top),
                  ValidationError);
}

TEST_CASE("multiple separated threats are all reported") {
  SynthScene scene;
  SynthObject sharp = threat_object(ThreatClass::Sharps);
  SynthObject lag = threat_object(ThreatClass::Lags);
  for (auto& part : lag.parts) {
    part.shape.cx -= 200;
    part.shape.cz -= 200;
  }
  scene.objects = {sharp, lag};
  const AttenuationBands bands;
  auto [top, side] = render_views(scene, 1.0, bands, "s0");
  const ImageRgb8 image = false_color(top, bands).image;

  const HeuristicDetector detector;
  const auto dets = detector.detect(image, "s0", View::Top);
  REQUIRE(dets.size() == 2);
  std::set<ThreatClass> classes;
  for (const auto& d : dets) classes.insert(d.class_id);
  CHECK(classes ==
        std::set<ThreatClass>{ThreatClass::Sharps, ThreatClass::Lags});
}

TEST_CASE("clutter produces orange blobs that can alarm as liquids") {
  // A compact organic block is indistinguishable from a liquid container to
  // this heuristic; it must alarm (such false positives give the PR curves
  // their shape).
  SynthObject block;
  block.parts.push_back(
      {{ShapeKind::Prism, 320, 200, 320, 40, 25, 45}, Material{0.9, 7.0}});
  const Rendered rendered = render_single(block, "s0");
  const HeuristicDetector detector;
  const auto dets = detector.detect(rendered.top, "s0", View::Top);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].class_id == ThreatClass::Lags);
}
