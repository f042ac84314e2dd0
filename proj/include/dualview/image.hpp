#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dualview {

// Row-major interleaved RGB, 8 bits per channel.
struct ImageRgb8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size = width * height * 3

  ImageRgb8() = default;
  ImageRgb8(int w, int h)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3,
               0) {}

  std::uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
};

// Minimal PNG support for this toolkit's own images: 8-bit RGB, non
// interlaced, deflate via zlib. Writing is byte-deterministic for identical
// input.
void write_png_rgb8(const ImageRgb8&, const std::filesystem::path&);
ImageRgb8 read_png_rgb8(const std::filesystem::path&);

// Lossless 16-bit record of the two transmission bands behind a rendered
// view, quantized to 1/65535 steps. Planar little-endian layout.
struct TransmissionSidecar {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> low;
  std::vector<std::uint16_t> high;
};

void write_sidecar(const TransmissionSidecar&, const std::filesystem::path&);
TransmissionSidecar read_sidecar(const std::filesystem::path&);

}  // namespace dualview
