#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dualview/dataset.hpp"
#include "dualview/image.hpp"

namespace dualview {

// Scene coordinates are millimetres: x spans the tunnel width, y its height,
// z the conveyor axis. The top view projects along y, the side view along x;
// both image u-axes run along the conveyor, which is what makes per-object
// conveyor spans directly comparable across views.

struct Tunnel {
  double width = 640.0;   // x
  double height = 430.0;  // y
  double depth = 640.0;   // z, one scan window on the conveyor
};

struct Material {
  double density;  // g/cm^3, > 0
  double z_eff;    // effective atomic number, in [1, 100]
};

enum class ShapeKind { Prism, Ellipsoid, CylinderY };

// Axis-aligned primitive. ex/ey/ez are half-extents for prisms, semi-axes
// for ellipsoids; a CylinderY uses ex as its radius in the x-z plane (ez is
// kept equal to ex) and ey as its half-height.
struct Primitive {
  ShapeKind kind;
  double cx, cy, cz;
  double ex, ey, ez;
};

struct SynthPart {
  Primitive shape;
  Material material;
};

// Objects are unions of non-overlapping parts, so per-ray path lengths add.
struct SynthObject {
  std::optional<ThreatClass> threat;  // absent for benign clutter
  std::vector<SynthPart> parts;

  struct Bounds {
    double x0, x1, y0, y1, z0, z1;
  };
  Bounds bounds() const;
};

struct SynthScene {
  Tunnel tunnel;
  std::vector<SynthObject> objects;
};

// Two-band attenuation model: mu(material, band) =
// density * (photoelectric[band] * z_eff^z_exponent + compton[band]),
// in units of 1/mm per unit density. The defaults separate organics from
// metals with a strictly monotone ln-ratio, and can be overridden from JSON
// so the material response stays data, not code.
struct AttenuationBands {
  double photoelectric_low = 1.2e-6;
  double compton_low = 0.018;
  double photoelectric_high = 2.5e-7;
  double compton_high = 0.016;
  double z_exponent = 3.8;

  double kappa_low(double z) const;
  double kappa_high(double z) const;
  double mu_low(const Material& m) const;
  double mu_high(const Material& m) const;

  static AttenuationBands load(const std::filesystem::path&);
  void save(const std::filesystem::path&) const;
};

// One projected view: per-pixel transmission in each band plus the tight
// ground-truth boxes of every threat, in pixel coordinates.
struct RenderedView {
  View view = View::Top;
  int width = 0;
  int height = 0;
  double resolution_mm = 1.0;
  std::vector<double> t_low;
  std::vector<double> t_high;
  std::vector<GroundTruthObject> ground_truth;
  std::string scan_id;

  double low_at(int x, int y) const { return t_low[index(x, y)]; }
  double high_at(int x, int y) const { return t_high[index(x, y)]; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
};

// Parallel-ray projection of the scene at the given sampling pitch.
std::pair<RenderedView, RenderedView> render_views(
    const SynthScene& scene, double resolution_mm, const AttenuationBands&,
    const std::string& scan_id);

// Inverts the two-band log-attenuation ratio back to an effective atomic
// number via a precomputed monotone calibration table.
class ZeffEstimator {
 public:
  explicit ZeffEstimator(const AttenuationBands&);
  double from_ratio(double ratio) const;
  double from_transmissions(double t_low, double t_high) const;

 private:
  std::vector<double> z_grid_;
  std::vector<double> ratio_grid_;
};

struct FalseColorConfig {
  double z_orange_green = 10.0;  // below: organic, orange
  double z_green_blue = 18.0;    // above: metallic, blue
};

struct FalseColorResult {
  ImageRgb8 image;
  std::size_t inconsistent_pixels = 0;  // opaque in one band only
};

// Material-coded display image: hue from the estimated effective atomic
// number, lightness tracking overall transmission, white background.
FalseColorResult false_color(const RenderedView&, const AttenuationBands&,
                             const FalseColorConfig& = {});

struct GenerateParams {
  int n_scans = 1;
  double threat_prob = 0.8;  // chance a bag holds (exactly one) threat
  std::array<double, 4> threat_mix = {0.25, 0.25, 0.25, 0.25};
  int clutter_min = 3;
  int clutter_max = 8;
  std::uint64_t seed = 0;
  double resolution_mm = 1.0;
  Tunnel tunnel;
  FalseColorConfig false_color;
};

struct SceneSample {
  SynthScene scene;
  std::string scan_id;
  std::string bag_id;
  std::optional<ThreatClass> threat;
};

// Deterministic scene for scan #index; every scan derives its own RNG stream
// from the master seed, so scenes are independent of generation order.
SceneSample sample_scene(const GenerateParams&, int index);

struct GeneratedDataset {
  std::vector<ScanAnnotation> annotations;
  std::filesystem::path annotations_path;
};

// Renders n_scans bag-scans into out_dir: annotations.jsonl, a false-color
// PNG and a transmission sidecar per view, and the attenuation config used.
GeneratedDataset generate_dataset(const GenerateParams&,
                                  const std::filesystem::path& out_dir,
                                  const AttenuationBands&);

}  // namespace dualview
