#include "dualview/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32_be(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) |
         static_cast<std::uint32_t>(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& data) {
  put_u32_be(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = static_cast<std::uint32_t>(
      crc32(0, out.data() + crc_start, static_cast<uInt>(4 + data.size())));
  put_u32_be(out, crc);
}

constexpr std::array<std::uint8_t, 8> kPngSignature = {137, 80, 78, 71,
                                                       13, 10, 26, 10};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

void write_png_rgb8(const ImageRgb8& image, const std::filesystem::path& path) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) *
                                 static_cast<std::size_t>(image.height) * 3) {
    throw ValidationError("write_png_rgb8: inconsistent image buffer");
  }

  // Every scanline is written with filter 0 (None).
  const std::size_t row_bytes = static_cast<std::size_t>(image.width) * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve((row_bytes + 1) * static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = image.at(0, y);
    raw.insert(raw.end(), row, row + row_bytes);
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(compressed_size);
  if (compress2(compressed.data(), &compressed_size, raw.data(),
                static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw IoError("png deflate failed");
  }
  compressed.resize(compressed_size);

  std::vector<std::uint8_t> ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(image.width));
  put_u32_be(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // color type: truecolor
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // no interlace

  std::vector<std::uint8_t> out(kPngSignature.begin(), kPngSignature.end());
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", compressed);
  append_chunk(out, "IEND", {});
  write_file(path, out);
}

ImageRgb8 read_png_rgb8(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() < 8 ||
      !std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin())) {
    throw IoError("not a PNG file: " + path.string());
  }

  std::size_t pos = 8;
  int width = 0;
  int height = 0;
  bool have_ihdr = false;
  std::vector<std::uint8_t> idat;
  while (pos + 12 <= bytes.size()) {
    const std::uint32_t length = get_u32_be(bytes.data() + pos);
    if (pos + 12 + length > bytes.size()) {
      throw IoError("truncated PNG chunk: " + path.string());
    }
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const std::uint8_t* data = bytes.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (length != 13) throw IoError("bad IHDR: " + path.string());
      width = static_cast<int>(get_u32_be(data));
      height = static_cast<int>(get_u32_be(data + 4));
      if (data[8] != 8 || data[9] != 2 || data[12] != 0) {
        throw IoError("unsupported PNG format (need 8-bit RGB): " +
                      path.string());
      }
      have_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + length);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + length;
  }
  if (!have_ihdr || width <= 0 || height <= 0) {
    throw IoError("missing IHDR: " + path.string());
  }

  const std::size_t row_bytes = static_cast<std::size_t>(width) * 3;
  const std::size_t raw_size = (row_bytes + 1) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> raw(raw_size);
  uLongf raw_len = static_cast<uLongf>(raw_size);
  if (uncompress(raw.data(), &raw_len, idat.data(),
                 static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw_size) {
    throw IoError("png inflate failed: " + path.string());
  }

  ImageRgb8 image(width, height);
  std::vector<std::uint8_t> prev(row_bytes, 0);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) *
                                               (row_bytes + 1);
    const std::uint8_t filter = src[0];
    ++src;
    std::uint8_t* dst = image.at(0, y);
    for (std::size_t i = 0; i < row_bytes; ++i) {
      const int left = i >= 3 ? dst[i - 3] : 0;
      const int up = prev[i];
      const int up_left = i >= 3 ? prev[i - 3] : 0;
      int value = src[i];
      switch (filter) {
        case 0:
          break;
        case 1:
          value += left;
          break;
        case 2:
          value += up;
          break;
        case 3:
          value += (left + up) / 2;
          break;
        case 4:
          value += paeth(left, up, up_left);
          break;
        default:
          throw IoError("unsupported PNG filter: " + path.string());
      }
      dst[i] = static_cast<std::uint8_t>(value & 0xff);
    }
    std::memcpy(prev.data(), dst, row_bytes);
  }
  return image;
}

namespace {

constexpr char kSidecarMagic[4] = {'D', 'V', 'T', 'S'};

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_plane(std::vector<std::uint8_t>& out,
               const std::vector<std::uint16_t>& plane) {
  for (std::uint16_t v : plane) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
}

}  // namespace

void write_sidecar(const TransmissionSidecar& sidecar,
                   const std::filesystem::path& path) {
  const std::size_t n = static_cast<std::size_t>(sidecar.width) *
                        static_cast<std::size_t>(sidecar.height);
  if (sidecar.low.size() != n || sidecar.high.size() != n) {
    throw ValidationError("write_sidecar: inconsistent plane sizes");
  }
  std::vector<std::uint8_t> out(kSidecarMagic, kSidecarMagic + 4);
  put_u32_le(out, static_cast<std::uint32_t>(sidecar.width));
  put_u32_le(out, static_cast<std::uint32_t>(sidecar.height));
  put_plane(out, sidecar.low);
  put_plane(out, sidecar.high);
  write_file(path, out);
}

TransmissionSidecar read_sidecar(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kSidecarMagic, 4) != 0) {
    throw IoError("not a transmission sidecar: " + path.string());
  }
  auto get_u32_le = [&](std::size_t at) {
    return static_cast<std::uint32_t>(bytes[at]) |
           (static_cast<std::uint32_t>(bytes[at + 1]) << 8) |
           (static_cast<std::uint32_t>(bytes[at + 2]) << 16) |
           (static_cast<std::uint32_t>(bytes[at + 3]) << 24);
  };
  TransmissionSidecar sidecar;
  sidecar.width = static_cast<int>(get_u32_le(4));
  sidecar.height = static_cast<int>(get_u32_le(8));
  const std::size_t n = static_cast<std::size_t>(sidecar.width) *
                        static_cast<std::size_t>(sidecar.height);
  if (bytes.size() != 12 + 4 * n) {
    throw IoError("sidecar size mismatch: " + path.string());
  }
  auto read_plane = [&](std::size_t offset, std::vector<std::uint16_t>& plane) {
    plane.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      plane[i] = static_cast<std::uint16_t>(
          bytes[offset + 2 * i] |
          (static_cast<std::uint16_t>(bytes[offset + 2 * i + 1]) << 8));
    }
  };
  read_plane(12, sidecar.low);
  read_plane(12 + 2 * n, sidecar.high);
  return sidecar;
}

}  // namespace dualview
