#include "dualview/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "dualview/errors.hpp"
#include "dualview/rng.hpp"

namespace dualview {

namespace {

constexpr double kSteelZ = 26.0;
constexpr double kSteelDensity = 7.8;

double part_x0(const Primitive& p) { return p.cx - p.ex; }
double part_x1(const Primitive& p) { return p.cx + p.ex; }
double part_y0(const Primitive& p) { return p.cy - p.ey; }
double part_y1(const Primitive& p) { return p.cy + p.ey; }
double part_z0(const Primitive& p) {
  return p.cz - (p.kind == ShapeKind::CylinderY ? p.ex : p.ez);
}
double part_z1(const Primitive& p) {
  return p.cz + (p.kind == ShapeKind::CylinderY ? p.ex : p.ez);
}

// Path length through the primitive for a vertical ray at (x, z).
double chord_along_y(const Primitive& p, double x, double z) {
  const double dx = x - p.cx;
  const double dz = z - p.cz;
  switch (p.kind) {
    case ShapeKind::Prism:
      return (std::abs(dx) < p.ex && std::abs(dz) < p.ez) ? 2.0 * p.ey : 0.0;
    case ShapeKind::Ellipsoid: {
      const double q =
          1.0 - (dx / p.ex) * (dx / p.ex) - (dz / p.ez) * (dz / p.ez);
      return q > 0.0 ? 2.0 * p.ey * std::sqrt(q) : 0.0;
    }
    case ShapeKind::CylinderY:
      return (dx * dx + dz * dz < p.ex * p.ex) ? 2.0 * p.ey : 0.0;
  }
  return 0.0;
}

// Path length through the primitive for a horizontal ray at (y, z).
double chord_along_x(const Primitive& p, double y, double z) {
  const double dy = y - p.cy;
  const double dz = z - p.cz;
  switch (p.kind) {
    case ShapeKind::Prism:
      return (std::abs(dy) < p.ey && std::abs(dz) < p.ez) ? 2.0 * p.ex : 0.0;
    case ShapeKind::Ellipsoid: {
      const double q =
          1.0 - (dy / p.ey) * (dy / p.ey) - (dz / p.ez) * (dz / p.ez);
      return q > 0.0 ? 2.0 * p.ex * std::sqrt(q) : 0.0;
    }
    case ShapeKind::CylinderY: {
      if (std::abs(dy) >= p.ey) return 0.0;
      const double q = p.ex * p.ex - dz * dz;
      return q > 0.0 ? 2.0 * std::sqrt(q) : 0.0;
    }
  }
  return 0.0;
}

int pixel_count(double extent_mm, double resolution_mm) {
  return static_cast<int>(std::ceil(extent_mm / resolution_mm - 1e-9));
}

}  // namespace

SynthObject::Bounds SynthObject::bounds() const {
  Bounds b{std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
  for (const auto& part : parts) {
    b.x0 = std::min(b.x0, part_x0(part.shape));
    b.x1 = std::max(b.x1, part_x1(part.shape));
    b.y0 = std::min(b.y0, part_y0(part.shape));
    b.y1 = std::max(b.y1, part_y1(part.shape));
    b.z0 = std::min(b.z0, part_z0(part.shape));
    b.z1 = std::max(b.z1, part_z1(part.shape));
  }
  return b;
}

double AttenuationBands::kappa_low(double z) const {
  return photoelectric_low * std::pow(z, z_exponent) + compton_low;
}

double AttenuationBands::kappa_high(double z) const {
  return photoelectric_high * std::pow(z, z_exponent) + compton_high;
}

double AttenuationBands::mu_low(const Material& m) const {
  return m.density * kappa_low(m.z_eff);
}

double AttenuationBands::mu_high(const Material& m) const {
  return m.density * kappa_high(m.z_eff);
}

AttenuationBands AttenuationBands::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ValidationError("malformed attenuation config: " + path.string());
  }
  AttenuationBands bands;
  auto get = [&](const char* key, double& field) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw ValidationError(std::string("attenuation config missing \"") +
                            key + "\"");
    }
    field = j[key].get<double>();
  };
  get("photoelectric_low", bands.photoelectric_low);
  get("compton_low", bands.compton_low);
  get("photoelectric_high", bands.photoelectric_high);
  get("compton_high", bands.compton_high);
  get("z_exponent", bands.z_exponent);
  return bands;
}

void AttenuationBands::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  nlohmann::ordered_json j;
  j["photoelectric_low"] = photoelectric_low;
  j["compton_low"] = compton_low;
  j["photoelectric_high"] = photoelectric_high;
  j["compton_high"] = compton_high;
  j["z_exponent"] = z_exponent;
  out << j.dump(2) << '\n';
}

std::pair<RenderedView, RenderedView> render_views(
    const SynthScene& scene, double resolution_mm,
    const AttenuationBands& bands, const std::string& scan_id) {
  if (!(resolution_mm > 0.0)) {
    throw ValidationError("resolution must be > 0");
  }
  for (const auto& obj : scene.objects) {
    const auto b = obj.bounds();
    if (b.x0 < 0.0 || b.x1 > scene.tunnel.width || b.y0 < 0.0 ||
        b.y1 > scene.tunnel.height || b.z0 < 0.0 ||
        b.z1 > scene.tunnel.depth) {
      throw ValidationError("scene object extends outside the tunnel");
    }
  }

  const int conveyor_px = pixel_count(scene.tunnel.depth, resolution_mm);

  RenderedView top;
  top.view = View::Top;
  top.width = conveyor_px;
  top.height = pixel_count(scene.tunnel.width, resolution_mm);
  top.resolution_mm = resolution_mm;
  top.scan_id = scan_id;

  RenderedView side;
  side.view = View::Side;
  side.width = conveyor_px;
  side.height = pixel_count(scene.tunnel.height, resolution_mm);
  side.resolution_mm = resolution_mm;
  side.scan_id = scan_id;

  for (RenderedView* view : {&top, &side}) {
    const std::size_t n = static_cast<std::size_t>(view->width) *
                          static_cast<std::size_t>(view->height);
    std::vector<double> path_low(n, 0.0);
    std::vector<double> path_high(n, 0.0);

    for (const auto& obj : scene.objects) {
      for (const auto& part : obj.parts) {
        const double mu_low = bands.mu_low(part.material);
        const double mu_high = bands.mu_high(part.material);
        // Only pixels under the part's footprint can intersect it.
        const int u0 = std::max(
            0, static_cast<int>(part_z0(part.shape) / resolution_mm) - 1);
        const int u1 = std::min(
            view->width - 1,
            static_cast<int>(part_z1(part.shape) / resolution_mm) + 1);
        const double v_lo = view->view == View::Top ? part_x0(part.shape)
                                                    : part_y0(part.shape);
        const double v_hi = view->view == View::Top ? part_x1(part.shape)
                                                    : part_y1(part.shape);
        const int v0 =
            std::max(0, static_cast<int>(v_lo / resolution_mm) - 1);
        const int v1 = std::min(view->height - 1,
                                static_cast<int>(v_hi / resolution_mm) + 1);
        for (int iv = v0; iv <= v1; ++iv) {
          const double coord_v = (iv + 0.5) * resolution_mm;
          for (int iu = u0; iu <= u1; ++iu) {
            const double z = (iu + 0.5) * resolution_mm;
            const double chord = view->view == View::Top
                                     ? chord_along_y(part.shape, coord_v, z)
                                     : chord_along_x(part.shape, coord_v, z);
            if (chord > 0.0) {
              const std::size_t idx = view->index(iu, iv);
              path_low[idx] += mu_low * chord;
              path_high[idx] += mu_high * chord;
            }
          }
        }
      }
    }

    view->t_low.resize(n);
    view->t_high.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      view->t_low[i] = std::exp(-path_low[i]);
      view->t_high[i] = std::exp(-path_high[i]);
    }
  }

  // Tight ground-truth boxes; the conveyor span is computed once so the two
  // views agree exactly.
  int threat_index = 0;
  for (const auto& obj : scene.objects) {
    if (!obj.threat) continue;
    const auto b = obj.bounds();
    const double ucx = ((b.z0 + b.z1) / 2.0) / resolution_mm;
    const double uw = (b.z1 - b.z0) / resolution_mm;
    char id[64];
    std::snprintf(id, sizeof(id), "%s_t%d", scan_id.c_str(), threat_index);
    ++threat_index;

    top.ground_truth.push_back(
        {Box(ucx, ((b.x0 + b.x1) / 2.0) / resolution_mm, uw,
             (b.x1 - b.x0) / resolution_mm),
         *obj.threat, id, View::Top, scan_id});
    side.ground_truth.push_back(
        {Box(ucx, ((b.y0 + b.y1) / 2.0) / resolution_mm, uw,
             (b.y1 - b.y0) / resolution_mm),
         *obj.threat, id, View::Side, scan_id});
  }

  return {std::move(top), std::move(side)};
}

ZeffEstimator::ZeffEstimator(const AttenuationBands& bands) {
  constexpr double kStep = 0.05;
  for (double z = 1.0; z <= 100.0 + 1e-9; z += kStep) {
    z_grid_.push_back(z);
    ratio_grid_.push_back(bands.kappa_low(z) / bands.kappa_high(z));
  }
  for (std::size_t i = 1; i < ratio_grid_.size(); ++i) {
    if (!(ratio_grid_[i] > ratio_grid_[i - 1])) {
      throw ValidationError(
          "attenuation config does not give a monotone ratio; cannot invert "
          "to an effective atomic number");
    }
  }
}

double ZeffEstimator::from_ratio(double ratio) const {
  if (ratio <= ratio_grid_.front()) return z_grid_.front();
  if (ratio >= ratio_grid_.back()) return z_grid_.back();
  const auto it =
      std::lower_bound(ratio_grid_.begin(), ratio_grid_.end(), ratio);
  const std::size_t hi = static_cast<std::size_t>(it - ratio_grid_.begin());
  const std::size_t lo = hi - 1;
  const double t =
      (ratio - ratio_grid_[lo]) / (ratio_grid_[hi] - ratio_grid_[lo]);
  return z_grid_[lo] + t * (z_grid_[hi] - z_grid_[lo]);
}

double ZeffEstimator::from_transmissions(double t_low, double t_high) const {
  constexpr double kFloor = 1e-300;
  const double ln_low = std::log(std::max(t_low, kFloor));
  const double ln_high = std::log(std::max(t_high, kFloor));
  if (ln_high == 0.0) return z_grid_.front();
  return from_ratio(ln_low / ln_high);
}

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

// HSL with full saturation at hue 30 (orange), 120 (green) or 240 (blue).
Rgb tint(int hue, double lightness) {
  const double c = 1.0 - std::abs(2.0 * lightness - 1.0);
  const double m = lightness - c / 2.0;
  double r = 0.0, g = 0.0, b = 0.0;
  switch (hue) {
    case 30:
      r = c;
      g = c / 2.0;
      break;
    case 120:
      g = c;
      break;
    case 240:
      b = c;
      break;
  }
  auto to8 = [&](double v) {
    return static_cast<std::uint8_t>(std::lround((v + m) * 255.0));
  };
  return {to8(r), to8(g), to8(b)};
}

}  // namespace

FalseColorResult false_color(const RenderedView& view,
                             const AttenuationBands& bands,
                             const FalseColorConfig& config) {
  const ZeffEstimator estimator(bands);
  FalseColorResult result;
  result.image = ImageRgb8(view.width, view.height);

  for (int y = 0; y < view.height; ++y) {
    for (int x = 0; x < view.width; ++x) {
      const double t_low = view.low_at(x, y);
      const double t_high = view.high_at(x, y);
      std::uint8_t* px = result.image.at(x, y);
      if (t_low == 1.0 && t_high == 1.0) {
        px[0] = px[1] = px[2] = 255;
        continue;
      }
      if (t_low == 1.0 || t_high == 1.0) {
        // Opaque in one band only cannot come from any material; flag it.
        ++result.inconsistent_pixels;
        px[0] = 255;
        px[1] = 0;
        px[2] = 255;
        continue;
      }
      const double z = estimator.from_transmissions(t_low, t_high);
      const int hue = z < config.z_orange_green ? 30
                      : z < config.z_green_blue ? 120
                                                : 240;
      const double overall = (t_low + t_high) / 2.0;
      const Rgb rgb = tint(hue, 0.05 + 0.87 * overall);
      px[0] = rgb.r;
      px[1] = rgb.g;
      px[2] = rgb.b;
    }
  }
  return result;
}

namespace {

// Uniform center position such that the given half-extents stay inside
// [lo, hi] on each axis.
double place_axis(Rng& rng, double lo, double hi, double half_extent) {
  const double a = lo + half_extent;
  const double b = hi - half_extent;
  if (b <= a) return (lo + hi) / 2.0;
  return uniform_range(rng, a, b);
}

struct BagBounds {
  double x0, x1, y0, y1, z0, z1;
};

SynthObject make_clutter(Rng& rng, const BagBounds& bag) {
  SynthObject obj;
  Primitive p;
  p.kind = uniform_double(rng) < 0.5 ? ShapeKind::Prism : ShapeKind::Ellipsoid;
  p.ex = uniform_range(rng, 10.0, 60.0);
  p.ey = uniform_range(rng, 10.0, 60.0);
  p.ez = uniform_range(rng, 10.0, 60.0);
  p.cx = place_axis(rng, bag.x0, bag.x1, p.ex);
  p.cy = place_axis(rng, bag.y0, bag.y1, p.ey);
  p.cz = place_axis(rng, bag.z0, bag.z1, p.ez);
  Material material;
  if (uniform_double(rng) < 0.7) {
    material = {uniform_range(rng, 0.7, 1.4), uniform_range(rng, 6.0, 9.0)};
  } else {
    material = {uniform_range(rng, 1.5, 3.0), uniform_range(rng, 11.0, 17.0)};
  }
  obj.parts.push_back({p, material});
  return obj;
}

// Thin elongated high-Z prism, long axis along the conveyor so both views
// see the blade profile.
SynthObject make_sharps(Rng& rng, const BagBounds& bag) {
  const double lz = uniform_range(rng, 40.0, 100.0);
  const double wx = uniform_range(rng, 1.4, 2.5);
  const double wy = uniform_range(rng, 4.0, 9.0);
  Primitive p{ShapeKind::Prism, 0.0, 0.0, 0.0, wx, wy, lz};
  p.cx = place_axis(rng, bag.x0, bag.x1, wx);
  p.cy = place_axis(rng, bag.y0, bag.y1, wy);
  p.cz = place_axis(rng, bag.z0, bag.z1, lz);
  SynthObject obj;
  obj.threat = ThreatClass::Sharps;
  obj.parts.push_back({p, {kSteelDensity, kSteelZ}});
  return obj;
}

// Two high-Z prisms sharing a face: a long body plus a grip offset both
// sideways and downward, so each view sees an L silhouette.
SynthObject make_firearms(Rng& rng, const BagBounds& bag) {
  const double body_z = uniform_range(rng, 55.0, 80.0);
  const double body_x = uniform_range(rng, 8.0, 15.0);
  const double body_y = uniform_range(rng, 12.0, 17.0);
  const double grip_z = uniform_range(rng, 12.0, 22.0);
  const double grip_x = uniform_range(rng, 20.0, 35.0);
  const double grip_y = uniform_range(rng, 24.0, 35.0);

  Primitive body{ShapeKind::Prism, 0.0, 0.0, 0.0, body_x, body_y, body_z};
  Primitive grip{ShapeKind::Prism, 0.0, 0.0, 0.0, grip_x, grip_y, grip_z};
  grip.cx = body_x + grip_x;  // touching the +x face, interiors disjoint
  grip.cy = -body_y - 0.4 * grip_y;
  grip.cz = -body_z + grip_z;

  SynthObject obj;
  obj.threat = ThreatClass::Firearms;
  obj.parts.push_back({body, {kSteelDensity, kSteelZ}});
  obj.parts.push_back({grip, {kSteelDensity, kSteelZ}});

  const auto b = obj.bounds();
  const double hx = (b.x1 - b.x0) / 2.0;
  const double hy = (b.y1 - b.y0) / 2.0;
  const double hz = (b.z1 - b.z0) / 2.0;
  const double dx = place_axis(rng, bag.x0, bag.x1, hx) - (b.x0 + hx);
  const double dy = place_axis(rng, bag.y0, bag.y1, hy) - (b.y0 + hy);
  const double dz = place_axis(rng, bag.z0, bag.z1, hz) - (b.z0 + hz);
  for (auto& part : obj.parts) {
    part.shape.cx += dx;
    part.shape.cy += dy;
    part.shape.cz += dz;
  }
  return obj;
}

// High-Z head with a mid-Z handle along the conveyor or across the tunnel.
SynthObject make_blunts(Rng& rng, const BagBounds& bag) {
  const double head_z = uniform_range(rng, 15.0, 24.0);
  const double head_x = uniform_range(rng, 13.0, 20.0);
  const double head_y = uniform_range(rng, 13.0, 20.0);
  const double handle_len = uniform_range(rng, 70.0, 110.0);
  const double handle_cross = uniform_range(rng, 6.0, 10.0);
  const bool along_conveyor = uniform_double(rng) < 0.5;

  Primitive head{ShapeKind::Prism, 0.0, 0.0, 0.0, head_x, head_y, head_z};
  Primitive handle{ShapeKind::Prism, 0.0, 0.0, 0.0,
                   handle_cross, handle_cross, handle_cross};
  if (along_conveyor) {
    handle.ez = handle_len;
    handle.cz = head_z + handle_len;
  } else {
    handle.ex = handle_len;
    handle.cx = head_x + handle_len;
  }

  SynthObject obj;
  obj.threat = ThreatClass::Blunts;
  obj.parts.push_back({head, {kSteelDensity, kSteelZ}});
  obj.parts.push_back(
      {handle, {2.7, uniform_range(rng, 11.5, 14.0)}});

  const auto b = obj.bounds();
  const double hx = (b.x1 - b.x0) / 2.0;
  const double hy = (b.y1 - b.y0) / 2.0;
  const double hz = (b.z1 - b.z0) / 2.0;
  const double dx = place_axis(rng, bag.x0, bag.x1, hx) - (b.x0 + hx);
  const double dy = place_axis(rng, bag.y0, bag.y1, hy) - (b.y0 + hy);
  const double dz = place_axis(rng, bag.z0, bag.z1, hz) - (b.z0 + hz);
  for (auto& part : obj.parts) {
    part.shape.cx += dx;
    part.shape.cy += dy;
    part.shape.cz += dz;
  }
  return obj;
}

// Upright low-Z liquid cylinder.
SynthObject make_lag(Rng& rng, const BagBounds& bag) {
  const double radius = uniform_range(rng, 25.0, 45.0);
  const double half_height = uniform_range(rng, 40.0, 70.0);
  Primitive p{ShapeKind::CylinderY, 0.0, 0.0, 0.0,
              radius, half_height, radius};
  p.cx = place_axis(rng, bag.x0, bag.x1, radius);
  p.cy = place_axis(rng, bag.y0, bag.y1, half_height);
  p.cz = place_axis(rng, bag.z0, bag.z1, radius);
  SynthObject obj;
  obj.threat = ThreatClass::Lags;
  obj.parts.push_back(
      {p, {uniform_range(rng, 0.95, 1.25), uniform_range(rng, 6.8, 8.2)}});
  return obj;
}

}  // namespace

SceneSample sample_scene(const GenerateParams& params, int index) {
  if (params.n_scans < 1) throw ValidationError("n_scans must be >= 1");
  if (params.clutter_min < 0 || params.clutter_max < params.clutter_min) {
    throw ValidationError("invalid clutter range");
  }
  double mix_total = 0.0;
  for (double m : params.threat_mix) {
    if (m < 0.0) throw ValidationError("threat mix entries must be >= 0");
    mix_total += m;
  }
  if (params.threat_prob > 0.0 && mix_total <= 0.0) {
    throw ValidationError("threat mix must have positive mass");
  }

  Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(index)));

  SceneSample sample;
  sample.scene.tunnel = params.tunnel;
  char id[32];
  std::snprintf(id, sizeof(id), "scan_%05d", index);
  sample.scan_id = id;
  std::snprintf(id, sizeof(id), "bag_%05d", index);
  sample.bag_id = id;

  const Tunnel& tunnel = params.tunnel;
  constexpr double kWall = 10.0;
  const double bag_hx =
      uniform_range(rng, 150.0, std::min(300.0, tunnel.width / 2.0 - kWall));
  const double bag_hy =
      uniform_range(rng, 80.0, std::min(190.0, tunnel.height / 2.0 - kWall));
  const double bag_hz =
      uniform_range(rng, 150.0, std::min(300.0, tunnel.depth / 2.0 - kWall));
  const double bag_cx = place_axis(rng, kWall, tunnel.width - kWall, bag_hx);
  const double bag_cy = place_axis(rng, kWall, tunnel.height - kWall, bag_hy);
  const double bag_cz = place_axis(rng, kWall, tunnel.depth - kWall, bag_hz);
  const BagBounds bag{bag_cx - bag_hx, bag_cx + bag_hx, bag_cy - bag_hy,
                      bag_cy + bag_hy, bag_cz - bag_hz, bag_cz + bag_hz};

  const int n_clutter = static_cast<int>(uniform_int(
      rng, params.clutter_min, params.clutter_max));
  for (int i = 0; i < n_clutter; ++i) {
    sample.scene.objects.push_back(make_clutter(rng, bag));
  }

  if (uniform_double(rng) < params.threat_prob) {
    double pick = uniform_double(rng) * mix_total;
    int cls = 0;
    for (int i = 0; i < 4; ++i) {
      pick -= params.threat_mix[static_cast<std::size_t>(i)];
      if (pick <= 0.0) {
        cls = i;
        break;
      }
    }
    SynthObject threat;
    switch (static_cast<ThreatClass>(cls)) {
      case ThreatClass::Sharps:
        threat = make_sharps(rng, bag);
        break;
      case ThreatClass::Blunts:
        threat = make_blunts(rng, bag);
        break;
      case ThreatClass::Firearms:
        threat = make_firearms(rng, bag);
        break;
      case ThreatClass::Lags:
        threat = make_lag(rng, bag);
        break;
    }
    sample.threat = threat.threat;
    sample.scene.objects.push_back(std::move(threat));
  }
  return sample;
}

GeneratedDataset generate_dataset(const GenerateParams& params,
                                  const std::filesystem::path& out_dir,
                                  const AttenuationBands& bands) {
  std::filesystem::create_directories(out_dir);

  GeneratedDataset dataset;
  for (int i = 0; i < params.n_scans; ++i) {
    SceneSample sample = sample_scene(params, i);
    auto [top, side] =
        render_views(sample.scene, params.resolution_mm, bands,
                     sample.scan_id);

    for (const RenderedView* view : {&top, &side}) {
      const FalseColorResult colored =
          false_color(*view, bands, params.false_color);
      const std::string stem =
          sample.scan_id + "_" + to_string(view->view);
      write_png_rgb8(colored.image, out_dir / (stem + ".png"));

      TransmissionSidecar sidecar;
      sidecar.width = view->width;
      sidecar.height = view->height;
      sidecar.low.reserve(view->t_low.size());
      sidecar.high.reserve(view->t_high.size());
      for (double t : view->t_low) {
        sidecar.low.push_back(
            static_cast<std::uint16_t>(std::lround(t * 65535.0)));
      }
      for (double t : view->t_high) {
        sidecar.high.push_back(
            static_cast<std::uint16_t>(std::lround(t * 65535.0)));
      }
      write_sidecar(sidecar, out_dir / (stem + ".dvt"));

      ScanAnnotation anno;
      anno.scan_id = sample.scan_id;
      anno.bag_id = sample.bag_id;
      anno.view = view->view;
      anno.image_w = view->width;
      anno.image_h = view->height;
      anno.image_path = stem + ".png";
      anno.objects = view->ground_truth;
      dataset.annotations.push_back(std::move(anno));
    }
  }

  dataset.annotations_path = out_dir / "annotations.jsonl";
  save_annotations(dataset.annotations, dataset.annotations_path);
  bands.save(out_dir / "attenuation.json");
  return dataset;
}

}  // namespace dualview
