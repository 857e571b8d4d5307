#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "providers/embedding.hpp"

namespace mempal {

// Packed 8-bit RGB raster, row-major, no padding.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h);
  static Image solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  std::size_t offset(int x, int y) const { return (static_cast<std::size_t>(y) * width + x) * 3; }

  friend bool operator==(const Image&, const Image&) = default;
};

// Binary PPM (P6). The only on-disk image format the engine writes.
std::string encode_ppm(const Image& img);
Image decode_ppm(std::string_view bytes);
Image read_ppm_file(const std::string& path);

// A reference to one camera frame or composite. Pixels are optional: replay
// scenarios may carry only a precomputed frame embedding. `tag` names the
// frame batch the image came from.
struct ImageRef {
  std::string id;
  std::string tag;
  std::shared_ptr<const Image> pixels;
  std::optional<EmbeddingVector> embedding;

  bool has_pixels() const { return pixels != nullptr; }
};

// Parses the frame notation used by scenario files and the /frames
// endpoint: "color:#rrggbb" (synthetic 32x24 frame), a path to a .ppm file
// (relative to base_dir), or any other string as an opaque frame id.
ImageRef frame_from_spec(std::string_view spec, const std::string& base_dir);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

}  // namespace mempal
