#include "dualview/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualview/errors.hpp"
#include "dualview/rng.hpp"

namespace dualview {

std::vector<TiledAnchor> tile_anchors(const AnchorConfig& config,
                                      double image_w, double image_h) {
  if (config.scales.empty() || config.aspect_ratios.empty()) {
    throw ValidationError("anchor config needs at least one scale and ratio");
  }
  for (double s : config.scales) {
    if (!(s > 0.0)) throw ValidationError("anchor scales must be > 0");
  }
  for (double r : config.aspect_ratios) {
    if (!(r > 0.0)) throw ValidationError("anchor aspect ratios must be > 0");
  }
  if (!(config.stride > 0.0) || config.stride > image_w ||
      config.stride > image_h) {
    throw ValidationError("anchor stride must be positive and no larger than "
                          "either image dimension");
  }

  const auto nx = static_cast<std::size_t>(image_w / config.stride);
  const auto ny = static_cast<std::size_t>(image_h / config.stride);

  std::vector<TiledAnchor> anchors;
  anchors.reserve(nx * ny * config.scales.size() *
                  config.aspect_ratios.size());
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double cx = (static_cast<double>(ix) + 0.5) * config.stride;
      const double cy = (static_cast<double>(iy) + 0.5) * config.stride;
      for (double scale : config.scales) {
        for (double ratio : config.aspect_ratios) {
          const double w = config.base_size * scale * std::sqrt(ratio);
          const double h = config.base_size * scale / std::sqrt(ratio);
          Box box(cx, cy, w, h);
          const bool crosses = box.left() < 0.0 || box.top() < 0.0 ||
                               box.right() > image_w || box.bottom() > image_h;
          anchors.push_back({box, crosses});
        }
      }
    }
  }
  return anchors;
}

double dims_iou(const BoxDims& a, const BoxDims& b) {
  const double inter = std::min(a.w, b.w) * std::min(a.h, b.h);
  const double uni = a.w * a.h + b.w * b.h - inter;
  return inter / uni;
}

namespace {

std::size_t nearest_centroid(const BoxDims& d,
                             const std::vector<BoxDims>& centroids) {
  std::size_t best = 0;
  double best_iou = -1.0;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double ov = dims_iou(d, centroids[c]);
    if (ov > best_iou) {
      best_iou = ov;
      best = c;
    }
  }
  return best;
}

double mean_distance(const std::vector<BoxDims>& dims,
                     const std::vector<std::size_t>& assignment,
                     const std::vector<BoxDims>& centroids) {
  double sum = 0.0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    sum += 1.0 - dims_iou(dims[i], centroids[assignment[i]]);
  }
  return sum / static_cast<double>(dims.size());
}

// k-means++ style seeding under the 1 - IoU distance.
std::vector<BoxDims> seed_centroids(const std::vector<BoxDims>& dims,
                                    std::size_t k, Rng& rng) {
  std::vector<BoxDims> centroids;
  centroids.reserve(k);
  centroids.push_back(dims[uniform_index(rng, dims.size())]);
  std::vector<double> best_dist(dims.size());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) {
        best = std::min(best, 1.0 - dims_iou(dims[i], c));
      }
      best_dist[i] = best * best;
      total += best_dist[i];
    }
    if (total <= 0.0) {
      // Every point coincides with a centroid; fall back to the first point
      // not already chosen (duplicated centroids are fine).
      std::size_t pick = 0;
      for (std::size_t i = 0; i < dims.size(); ++i) {
        bool used = false;
        for (const auto& c : centroids) {
          if (c == dims[i]) used = true;
        }
        if (!used) {
          pick = i;
          break;
        }
      }
      centroids.push_back(dims[pick]);
      continue;
    }
    double target = uniform_double(rng) * total;
    std::size_t pick = dims.size() - 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      target -= best_dist[i];
      if (target <= 0.0) {
        pick = i;
        break;
      }
    }
    centroids.push_back(dims[pick]);
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans_anchors(const std::vector<BoxDims>& dims, std::size_t k,
                            std::uint64_t seed) {
  if (k < 1) throw ValidationError("kmeans_anchors requires k >= 1");
  if (dims.size() < k) {
    throw ValidationError("kmeans_anchors requires at least k boxes");
  }
  for (const auto& d : dims) {
    if (!(d.w > 0.0) || !(d.h > 0.0)) {
      throw ValidationError("box dimensions must be > 0");
    }
  }

  constexpr int kMaxIterations = 300;
  Rng rng(seed);

  std::vector<BoxDims> centroids = seed_centroids(dims, k, rng);
  std::vector<std::size_t> assignment(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    assignment[i] = nearest_centroid(dims[i], centroids);
  }
  double objective = mean_distance(dims, assignment, centroids);

  KMeansResult result;
  result.objective_history.push_back(objective);

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // Cluster means as the update.
    std::vector<BoxDims> updated(k, BoxDims{0.0, 0.0});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      updated[assignment[i]].w += dims[i].w;
      updated[assignment[i]].h += dims[i].h;
      ++counts[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        updated[c].w /= static_cast<double>(counts[c]);
        updated[c].h /= static_cast<double>(counts[c]);
      } else {
        // Re-seed an empty cluster from the point farthest from its centroid.
        std::size_t farthest = 0;
        double worst = -1.0;
        for (std::size_t i = 0; i < dims.size(); ++i) {
          const double dist =
              1.0 - dims_iou(dims[i], centroids[assignment[i]]);
          if (dist > worst) {
            worst = dist;
            farthest = i;
          }
        }
        updated[c] = dims[farthest];
      }
    }

    std::vector<std::size_t> new_assignment(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
      new_assignment[i] = nearest_centroid(dims[i], updated);
    }
    const double new_objective = mean_distance(dims, new_assignment, updated);
    if (new_objective > objective) break;  // keep the previous state

    const bool converged = new_assignment == assignment;
    centroids = std::move(updated);
    assignment = std::move(new_assignment);
    objective = new_objective;
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;
    if (converged) break;
  }

  std::sort(centroids.begin(), centroids.end(),
            [](const BoxDims& a, const BoxDims& b) {
              if (a.w * a.h != b.w * b.h) return a.w * a.h < b.w * b.h;
              return a.w < b.w;
            });
  result.centroids = std::move(centroids);
  result.mean_iou = 1.0 - objective;
  return result;
}

CoverageStats anchor_coverage(const std::vector<BoxDims>& candidates,
                              const std::vector<BoxDims>& dims) {
  if (candidates.empty() || dims.empty()) {
    throw ValidationError("anchor_coverage requires non-empty inputs");
  }
  CoverageStats stats;
  stats.min_iou = std::numeric_limits<double>::infinity();
  std::size_t above_half = 0;
  for (const auto& d : dims) {
    double best = 0.0;
    for (const auto& c : candidates) best = std::max(best, dims_iou(d, c));
    stats.mean_iou += best;
    stats.min_iou = std::min(stats.min_iou, best);
    if (best > 0.5) ++above_half;
  }
  stats.mean_iou /= static_cast<double>(dims.size());
  stats.frac_above_half =
      static_cast<double>(above_half) / static_cast<double>(dims.size());
  return stats;
}

}  // namespace dualview
