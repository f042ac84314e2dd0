#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dualview/anchors.hpp"
#include "dualview/rng.hpp"

using namespace dualview;

namespace {

std::vector<BoxDims> random_dims(Rng& rng, std::size_t n) {
  std::vector<BoxDims> dims;
  dims.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    dims.push_back({uniform_range(rng, 5.0, 200.0),
                    uniform_range(rng, 5.0, 200.0)});
  }
  return dims;
}

}  // namespace

TEST_CASE("tiling covers the grid with one anchor per cell/scale/ratio") {
  AnchorConfig one;
  one.base_size = 256;
  one.stride = 600;
  one.scales = {1.0};
  one.aspect_ratios = {1.0};
  const auto single = tile_anchors(one, 600, 600);
  REQUIRE(single.size() == 1);
  CHECK(single[0].box.cx() == 300.0);
  CHECK(single[0].box.cy() == 300.0);
  CHECK(single[0].box.w() == 256.0);
  CHECK(single[0].box.h() == 256.0);

  AnchorConfig grid;
  grid.stride = 16;
  grid.scales = {0.25, 0.5, 1.0};
  grid.aspect_ratios = {0.5, 1.0, 2.0};
  CHECK(tile_anchors(grid, 64, 64).size() == 4 * 4 * 9);
}

TEST_CASE("tiled anchor count follows floor(H/s)*floor(W/s)*|scales|*|ratios|") {
  Rng rng(59);
  for (int trial = 0; trial < 25; ++trial) {
    AnchorConfig config;
    config.stride = uniform_range(rng, 8.0, 64.0);
    config.scales.resize(1 + uniform_index(rng, 4), 1.0);
    config.aspect_ratios.resize(1 + uniform_index(rng, 4), 1.0);
    const double w = uniform_range(rng, config.stride, 800.0);
    const double h = uniform_range(rng, config.stride, 800.0);
    const auto anchors = tile_anchors(config, w, h);
    const std::size_t expected =
        static_cast<std::size_t>(w / config.stride) *
        static_cast<std::size_t>(h / config.stride) * config.scales.size() *
        config.aspect_ratios.size();
    CHECK(anchors.size() == expected);
  }
}

TEST_CASE("anchor aspect ratios are exact and border anchors are flagged") {
  AnchorConfig config;
  config.base_size = 256;
  config.stride = 16;
  config.scales = {0.5, 1.0};
  config.aspect_ratios = {0.5, 1.0, 2.0};
  for (const auto& anchor : tile_anchors(config, 256, 256)) {
    bool matched = false;
    for (double ratio : config.aspect_ratios) {
      if (std::abs(anchor.box.w() / anchor.box.h() - ratio) < 1e-9) {
        matched = true;
      }
    }
    CHECK(matched);
    const bool outside = anchor.box.left() < 0 || anchor.box.top() < 0 ||
                         anchor.box.right() > 256 ||
                         anchor.box.bottom() > 256;
    CHECK(anchor.crosses_border == outside);
  }
  // A 256-scale anchor centered at (8, 8) must cross.
  const auto anchors = tile_anchors(config, 256, 256);
  CHECK(anchors[0].crosses_border);
}

TEST_CASE("tiling validates stride against image size") {
  AnchorConfig config;
  config.stride = 700;
  CHECK_THROWS_AS(tile_anchors(config, 600, 600), ValidationError);
}

TEST_CASE("co-centered dims iou") {
  CHECK(dims_iou({10, 10}, {10, 10}) == 1.0);
  CHECK(dims_iou({10, 10}, {20, 20}) == doctest::Approx(0.25));
  CHECK(dims_iou({10, 40}, {40, 10}) ==
        doctest::Approx(100.0 / (400.0 + 400.0 - 100.0)));
}

TEST_CASE("kmeans collapses identical boxes to their own centroid") {
  const std::vector<BoxDims> dims(12, BoxDims{10, 10});
  const auto result = kmeans_anchors(dims, 1, 0);
  REQUIRE(result.centroids.size() == 1);
  CHECK(result.centroids[0] == BoxDims{10, 10});
  CHECK(result.mean_iou == 1.0);
}

TEST_CASE("kmeans recovers a clean two-cluster mixture exactly") {
  // With only two distinct dimension values the optimal 2-partition is to
  // separate them, leaving every box at IoU 1 with its centroid.
  std::vector<BoxDims> dims;
  for (int i = 0; i < 15; ++i) dims.push_back({10, 10});
  for (int i = 0; i < 15; ++i) dims.push_back({100, 50});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto result = kmeans_anchors(dims, 2, seed);
    REQUIRE(result.centroids.size() == 2);
    CHECK(result.centroids[0] == BoxDims{10, 10});
    CHECK(result.centroids[1] == BoxDims{100, 50});
    CHECK(result.mean_iou == 1.0);
  }
}

TEST_CASE("kmeans with one centroid per distinct value is exact") {
  const std::vector<BoxDims> dims = {{10, 10}, {40, 20}, {80, 90}, {15, 60}};
  const auto result = kmeans_anchors(dims, dims.size(), 3);
  CHECK(result.mean_iou == 1.0);
}

TEST_CASE("kmeans objective never increases between iterations") {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dims = random_dims(rng, 20 + uniform_index(rng, 60));
    const std::size_t k = 1 + uniform_index(rng, 6);
    const auto result = kmeans_anchors(dims, k, rng());
    REQUIRE(!result.objective_history.empty());
    for (std::size_t i = 1; i < result.objective_history.size(); ++i) {
      CHECK(result.objective_history[i] <=
            result.objective_history[i - 1] + 1e-15);
    }
    CHECK(result.mean_iou ==
          doctest::Approx(1.0 - result.objective_history.back()));
  }
}

TEST_CASE("best-of-seeds mean iou does not degrade as k grows") {
  Rng rng(67);
  const auto dims = random_dims(rng, 150);
  double previous = 0.0;
  for (std::size_t k = 1; k <= 6; ++k) {
    double best = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      best = std::max(best, kmeans_anchors(dims, k, seed).mean_iou);
    }
    CHECK(best >= previous - 1e-12);
    previous = best;
  }
}

TEST_CASE("kmeans validates its inputs") {
  CHECK_THROWS_AS(kmeans_anchors({{10, 10}}, 2, 0), ValidationError);
  CHECK_THROWS_AS(kmeans_anchors({}, 1, 0), ValidationError);
  CHECK_THROWS_AS(kmeans_anchors({{0.0, 10}}, 1, 0), ValidationError);
}

TEST_CASE("coverage statistics") {
  const std::vector<BoxDims> dims = {{10, 10}, {30, 40}, {80, 20}};
  const auto identity = anchor_coverage(dims, dims);
  CHECK(identity.mean_iou == 1.0);
  CHECK(identity.min_iou == 1.0);
  CHECK(identity.frac_above_half == 1.0);

  const auto quarter = anchor_coverage({{10, 10}}, {{20, 20}});
  CHECK(quarter.mean_iou == doctest::Approx(0.25));
  CHECK(quarter.min_iou == doctest::Approx(0.25));
  CHECK(quarter.frac_above_half == 0.0);

  // Co-centered boxes always intersect, so coverage is never zero.
  Rng rng(71);
  const auto stats =
      anchor_coverage(random_dims(rng, 5), random_dims(rng, 40));
  CHECK(stats.min_iou > 0.0);

  CHECK_THROWS_AS(anchor_coverage({}, dims), ValidationError);
}
