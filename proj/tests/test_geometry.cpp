#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "dualview/geometry.hpp"
#include "dualview/rng.hpp"
#include "oracles.hpp"

using namespace dualview;
using namespace dualview::testing;

namespace {

// Detection-scale boxes: tens to hundreds of pixels.
Box random_box(Rng& rng) {
  return Box(uniform_range(rng, 100.0, 400.0),
             uniform_range(rng, 100.0, 400.0),
             uniform_range(rng, 40.0, 300.0), uniform_range(rng, 40.0, 300.0));
}

Detection det(double cx, double cy, double w, double h, ThreatClass cls,
              double score) {
  return Detection(Box(cx, cy, w, h), cls, score, View::Top, "s0");
}

}  // namespace

TEST_CASE("box construction rejects degenerate dimensions") {
  CHECK_THROWS_AS(Box(0, 0, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(Box(0, 0, 1.0, -2.0), ValidationError);
  CHECK_THROWS_AS(Box(0, 0, std::nan(""), 1.0), ValidationError);
  const Box b(5, 6, 2, 4);
  CHECK(b.area() == 8.0);
  CHECK(b.left() == 4.0);
  CHECK(b.bottom() == 8.0);
}

TEST_CASE("detection scores must lie in [0, 1]") {
  CHECK_THROWS_AS(det(0, 0, 1, 1, ThreatClass::Sharps, 1.5), ValidationError);
  CHECK_THROWS_AS(det(0, 0, 1, 1, ThreatClass::Sharps, -0.1), ValidationError);
}

TEST_CASE("iou identity, disjoint and half-overlap cases") {
  const Box a(5, 5, 10, 10);
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, Box(100, 100, 4, 4)) == 0.0);
  // Boxes [0,10]x[0,10] and [5,15]x[0,10]: intersection 50, union 150.
  const Box b(10, 5, 10, 10);
  CHECK(iou(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(iou(a, b) - raster_iou(a, b)) < 1e-9);
}

TEST_CASE("iou is symmetric and drops to zero when translated apart") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Box a = random_box(rng);
    const Box b = random_box(rng);
    CHECK(iou(a, b) == iou(b, a));
  }
  const Box c(0, 0, 4, 4);
  CHECK(iou(c, Box(3, 0, 4, 4)) > 0.0);
  CHECK(iou(c, Box(4.0001, 0, 4, 4)) == 0.0);
}

TEST_CASE("analytic iou matches the rasterization oracle") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const Box a = random_box(rng);
    const Box b = random_box(rng);
    CHECK(std::abs(iou(a, b) - raster_iou(a, b)) < 1e-3);
  }
}

TEST_CASE("separable raster counting equals full 2-D rasterization") {
  Rng rng(13);
  for (int i = 0; i < 5; ++i) {
    const Box a(uniform_range(rng, 0.0, 10.0), uniform_range(rng, 0.0, 10.0),
                uniform_range(rng, 2.0, 8.0), uniform_range(rng, 2.0, 8.0));
    const Box b(uniform_range(rng, 0.0, 10.0), uniform_range(rng, 0.0, 10.0),
                uniform_range(rng, 2.0, 8.0), uniform_range(rng, 2.0, 8.0));
    CHECK(raster_iou(a, b, 0.05) == doctest::Approx(raster_iou_2d(a, b, 0.05))
                                        .epsilon(1e-12));
  }
}

TEST_CASE("nms keeps a singleton and drops an identical duplicate") {
  const auto single = nms({det(5, 5, 4, 4, ThreatClass::Lags, 0.7)}, 0.5);
  REQUIRE(single.size() == 1);
  CHECK(single[0].score == 0.7);

  const auto deduped = nms({det(5, 5, 4, 4, ThreatClass::Lags, 0.9),
                            det(5, 5, 4, 4, ThreatClass::Lags, 0.8)},
                           0.5);
  REQUIRE(deduped.size() == 1);
  CHECK(deduped[0].score == 0.9);
}

TEST_CASE("nms keeps disjoint boxes and boxes of different classes") {
  const auto kept = nms({det(5, 5, 4, 4, ThreatClass::Lags, 0.9),
                         det(50, 50, 4, 4, ThreatClass::Lags, 0.8)},
                        0.5);
  CHECK(kept.size() == 2);

  const auto cross = nms({det(5, 5, 4, 4, ThreatClass::Lags, 0.9),
                          det(5, 5, 4, 4, ThreatClass::Sharps, 0.8)},
                         0.5);
  CHECK(cross.size() == 2);
}

TEST_CASE("nms rejects out-of-range thresholds and passes empty input") {
  CHECK_THROWS_AS(nms({}, 0.0), ValidationError);
  CHECK_THROWS_AS(nms({}, 1.0), ValidationError);
  CHECK(nms({}, 0.5).empty());
}

TEST_CASE("nms agrees with the exhaustive subset oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Detection> dets;
    const std::size_t n = 2 + uniform_index(rng, 6);
    for (std::size_t i = 0; i < n; ++i) {
      dets.push_back(det(uniform_range(rng, 0.0, 12.0),
                         uniform_range(rng, 0.0, 12.0),
                         uniform_range(rng, 3.0, 8.0),
                         uniform_range(rng, 3.0, 8.0),
                         uniform_index(rng, 2) ? ThreatClass::Sharps
                                               : ThreatClass::Lags,
                         lattice_score(rng)));
    }
    const auto expected = exhaustive_nms(dets, 0.4);
    const auto actual = nms(dets, 0.4);
    REQUIRE(actual.size() == expected.size());
    for (std::size_t i = 0; i < actual.size(); ++i) {
      CHECK(actual[i].box == expected[i].box);
      CHECK(actual[i].score == expected[i].score);
      CHECK(actual[i].class_id == expected[i].class_id);
    }
  }
}

TEST_CASE("nms output is invariant to input order") {
  Rng rng(19);
  std::vector<Detection> dets;
  for (int i = 0; i < 10; ++i) {
    dets.push_back(det(uniform_range(rng, 0.0, 15.0),
                       uniform_range(rng, 0.0, 15.0),
                       uniform_range(rng, 3.0, 8.0),
                       uniform_range(rng, 3.0, 8.0), ThreatClass::Blunts,
                       lattice_score(rng)));
  }
  const auto baseline = nms(dets, 0.5);
  for (int shuffle = 0; shuffle < 20; ++shuffle) {
    shuffle_in_place(dets, rng);
    const auto reordered = nms(dets, 0.5);
    REQUIRE(reordered.size() == baseline.size());
    for (std::size_t i = 0; i < baseline.size(); ++i) {
      CHECK(reordered[i].box == baseline[i].box);
      CHECK(reordered[i].score == baseline[i].score);
    }
  }
}

TEST_CASE("nms kept set is pairwise below threshold and keeps class maxima") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Detection> dets;
    for (int i = 0; i < 12; ++i) {
      dets.push_back(det(uniform_range(rng, 0.0, 20.0),
                         uniform_range(rng, 0.0, 20.0),
                         uniform_range(rng, 3.0, 9.0),
                         uniform_range(rng, 3.0, 9.0),
                         static_cast<ThreatClass>(uniform_index(rng, 4)),
                         lattice_score(rng)));
    }
    const double threshold = 0.45;
    const auto kept = nms(dets, threshold);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        if (kept[i].class_id == kept[j].class_id) {
          CHECK(iou(kept[i].box, kept[j].box) <= threshold);
        }
      }
    }
    // The top-scoring detection of every class always survives.
    for (ThreatClass cls : kAllClasses) {
      const Detection* top = nullptr;
      for (const auto& d : dets) {
        if (d.class_id == cls && (top == nullptr || score_order(d, *top))) {
          top = &d;
        }
      }
      if (top == nullptr) continue;
      const bool present =
          std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
            return k.class_id == cls && k.box == top->box &&
                   k.score == top->score;
          });
      CHECK(present);
    }
  }
}
