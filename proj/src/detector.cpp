#include "dualview/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "dualview/errors.hpp"

namespace dualview {

void DetectorParams::validate() const {
  if (!(min_blob_area >= 1.0)) {
    throw ValidationError("min_blob_area must be >= 1");
  }
  if (!(nms_iou > 0.0 && nms_iou < 1.0)) {
    throw ValidationError("nms_iou must lie in (0, 1)");
  }
}

namespace {

enum class Band { Background, Orange, Green, Blue, Unknown };

double hue_degrees(int r, int g, int b) {
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const double span = mx - mn;
  double h = 0.0;
  if (mx == r) {
    h = 60.0 * (g - b) / span;
  } else if (mx == g) {
    h = 120.0 + 60.0 * (b - r) / span;
  } else {
    h = 240.0 + 60.0 * (r - g) / span;
  }
  return h < 0.0 ? h + 360.0 : h;
}

struct PixelClass {
  Band band = Band::Background;
  double hue = 0.0;
};

PixelClass classify_pixel(const std::uint8_t* px) {
  const int r = px[0], g = px[1], b = px[2];
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  if (mx >= 250 && mx - mn <= 4) return {Band::Background, 0.0};
  // The synthetic colormap keeps chroma well above this for any material;
  // low-chroma non-white pixels mean the image is not ours.
  if (mx - mn < 12) return {Band::Unknown, 0.0};
  const double hue = hue_degrees(r, g, b);
  if (hue >= 5.0 && hue < 75.0) return {Band::Orange, hue};
  if (hue >= 75.0 && hue < 180.0) return {Band::Green, hue};
  if (hue >= 180.0 && hue < 285.0) return {Band::Blue, hue};
  return {Band::Unknown, hue};
}

double canonical_hue(Band band) {
  switch (band) {
    case Band::Orange:
      return 30.0;
    case Band::Green:
      return 120.0;
    case Band::Blue:
      return 240.0;
    default:
      return 0.0;
  }
}

struct Blob {
  Band band = Band::Unknown;
  std::size_t area = 0;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive pixel bbox
  double hue_dev_sum = 0.0;
  bool consumed = false;

  int bbox_w() const { return x1 - x0 + 1; }
  int bbox_h() const { return y1 - y0 + 1; }
  double aspect() const {
    return static_cast<double>(std::max(bbox_w(), bbox_h())) /
           static_cast<double>(std::min(bbox_w(), bbox_h()));
  }
  double fill() const {
    return static_cast<double>(area) /
           (static_cast<double>(bbox_w()) * static_cast<double>(bbox_h()));
  }
  double purity() const {
    const double mean_dev = hue_dev_sum / static_cast<double>(area);
    return std::clamp(1.0 - mean_dev / 60.0, 0.0, 1.0);
  }
  Box box() const {
    return Box((x0 + x1 + 1) / 2.0, (y0 + y1 + 1) / 2.0,
               static_cast<double>(bbox_w()), static_cast<double>(bbox_h()));
  }
};

bool bboxes_adjacent(const Blob& a, const Blob& b, int margin) {
  return a.x0 - margin <= b.x1 && b.x0 - margin <= a.x1 &&
         a.y0 - margin <= b.y1 && b.y0 - margin <= a.y1;
}

// 4-connected components per hue band, in row-major discovery order.
std::vector<Blob> find_blobs(const std::vector<PixelClass>& classes, int width,
                             int height) {
  std::vector<int> labels(classes.size(), -1);
  std::vector<Blob> blobs;
  std::vector<std::size_t> stack;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t start = static_cast<std::size_t>(y) * width + x;
      const Band band = classes[start].band;
      if (band == Band::Background || band == Band::Unknown ||
          labels[start] >= 0) {
        continue;
      }
      const int label = static_cast<int>(blobs.size());
      Blob blob;
      blob.band = band;
      blob.x0 = blob.x1 = x;
      blob.y0 = blob.y1 = y;
      labels[start] = label;
      stack.assign(1, start);
      while (!stack.empty()) {
        const std::size_t idx = stack.back();
        stack.pop_back();
        const int px = static_cast<int>(idx % width);
        const int py = static_cast<int>(idx / width);
        ++blob.area;
        blob.x0 = std::min(blob.x0, px);
        blob.x1 = std::max(blob.x1, px);
        blob.y0 = std::min(blob.y0, py);
        blob.y1 = std::max(blob.y1, py);
        blob.hue_dev_sum +=
            std::abs(classes[idx].hue - canonical_hue(band));
        const std::array<std::pair<int, int>, 4> neighbors = {
            {{px - 1, py}, {px + 1, py}, {px, py - 1}, {px, py + 1}}};
        for (const auto& [nx, ny] : neighbors) {
          if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * width + nx;
          if (labels[nidx] < 0 && classes[nidx].band == band) {
            labels[nidx] = label;
            stack.push_back(nidx);
          }
        }
      }
      blobs.push_back(blob);
    }
  }
  return blobs;
}

}  // namespace

HeuristicDetector::HeuristicDetector(DetectorParams params)
    : params_(params) {
  params_.validate();
}

std::vector<Detection> HeuristicDetector::detect(const ImageRgb8& image,
                                                 const std::string& scan_id,
                                                 View view) const {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) *
                                 static_cast<std::size_t>(image.height) * 3) {
    throw ValidationError("detector input image is empty or inconsistent");
  }

  const std::size_t n = static_cast<std::size_t>(image.width) *
                        static_cast<std::size_t>(image.height);
  std::vector<PixelClass> classes(n);
  std::size_t unknown = 0;
  for (std::size_t i = 0; i < n; ++i) {
    classes[i] = classify_pixel(image.pixels.data() + i * 3);
    if (classes[i].band == Band::Unknown) ++unknown;
  }
  if (static_cast<double>(unknown) > 0.002 * static_cast<double>(n)) {
    throw ValidationError(
        "image does not follow the expected false-color scheme");
  }

  std::vector<Blob> blobs = find_blobs(classes, image.width, image.height);
  std::erase_if(blobs, [&](const Blob& b) {
    return static_cast<double>(b.area) < params_.min_blob_area;
  });

  auto normalized_area = [&](double area) {
    return std::min(1.0, area / params_.area_norm);
  };
  auto make_score = [&](double purity, double fit, double narea) {
    const double s = params_.purity_weight * purity +
                     params_.aspect_weight * fit +
                     params_.area_weight * narea;
    return std::clamp(s, 1e-4, 1.0);
  };

  std::vector<Detection> dets;
  for (Blob& blob : blobs) {
    if (blob.band != Band::Blue) continue;
    const double aspect = blob.aspect();
    if (aspect >= params_.sharps_min_aspect) {
      const double fit = std::min(1.0, aspect / 8.0);
      dets.emplace_back(blob.box(), ThreatClass::Sharps,
                        make_score(blob.purity(), fit,
                                   normalized_area(
                                       static_cast<double>(blob.area))),
                        view, scan_id);
    } else if (blob.fill() <= params_.firearm_max_fill) {
      const double fit =
          std::clamp(1.0 - std::abs(blob.fill() - 0.55) * 1.8, 0.1, 1.0);
      dets.emplace_back(blob.box(), ThreatClass::Firearms,
                        make_score(blob.purity(), fit,
                                   normalized_area(
                                       static_cast<double>(blob.area))),
                        view, scan_id);
    } else {
      // Solid compact metal: a striking head. A long mid-Z neighbor is its
      // handle; without one the head alone still alarms, with less shape
      // support.
      Blob* handle = nullptr;
      for (Blob& g : blobs) {
        if (g.band == Band::Green && !g.consumed &&
            g.aspect() >= params_.handle_min_aspect &&
            bboxes_adjacent(blob, g, params_.adjacency_px)) {
          handle = &g;
          break;
        }
      }
      Blob combined = blob;
      double fit = 0.3;
      if (handle != nullptr) {
        handle->consumed = true;
        combined.x0 = std::min(blob.x0, handle->x0);
        combined.y0 = std::min(blob.y0, handle->y0);
        combined.x1 = std::max(blob.x1, handle->x1);
        combined.y1 = std::max(blob.y1, handle->y1);
        combined.area = blob.area + handle->area;
        fit = std::min(1.0, handle->aspect() / 8.0);
      }
      dets.emplace_back(combined.box(), ThreatClass::Blunts,
                        make_score(blob.purity(), fit,
                                   normalized_area(
                                       static_cast<double>(combined.area))),
                        view, scan_id);
    }
  }
  for (Blob& blob : blobs) {
    if (blob.band != Band::Orange || blob.consumed) continue;
    if (blob.aspect() > params_.lag_max_aspect) continue;
    const double fit = std::clamp(
        1.0 - (blob.aspect() - 1.0) / params_.lag_max_aspect, 0.1, 1.0);
    dets.emplace_back(blob.box(), ThreatClass::Lags,
                      make_score(blob.purity(), fit,
                                 normalized_area(
                                     static_cast<double>(blob.area))),
                      view, scan_id);
  }

  return nms(std::move(dets), params_.nms_iou);
}

}  // namespace dualview
