#include "ingest/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "common/error.hpp"

namespace mempal {

std::pair<int, int> grid_shape(std::size_t n) {
  if (n == 0) return {0, 0};
  int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  int rows = static_cast<int>((n + cols - 1) / cols);
  return {cols, rows};
}

ImageRef tile_frames(std::span<const ImageRef> frames) {
  if (frames.empty()) fail(ErrorCode::InvalidArgument, "cannot tile an empty frame list");
  if (frames.size() > kMaxTiledFrames) {
    fail(ErrorCode::TooManyFrames, "at most " + std::to_string(kMaxTiledFrames) + " frames per tile, got " +
                                       std::to_string(frames.size()));
  }
  if (frames.size() == 1) return frames.front();

  ImageRef out;
  out.tag = frames.front().tag;
  out.id = "tile:";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i) out.id += '+';
    out.id += frames[i].id;
  }
  const bool all_pixels = std::all_of(frames.begin(), frames.end(), [](const ImageRef& f) { return f.has_pixels(); });
  if (!all_pixels) return out;

  int cell_w = 0, cell_h = 0;
  for (const auto& f : frames) {
    cell_w = std::max(cell_w, f.pixels->width);
    cell_h = std::max(cell_h, f.pixels->height);
  }
  const auto [cols, rows] = grid_shape(frames.size());
  auto img = std::make_shared<Image>(cell_w * cols, cell_h * rows);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Image& src = *frames[i].pixels;
    const int ox = static_cast<int>(i % cols) * cell_w;
    const int oy = static_cast<int>(i / cols) * cell_h;
    for (int y = 0; y < src.height; ++y) {
      std::memcpy(&img->rgb[img->offset(ox, oy + y)], &src.rgb[src.offset(0, y)],
                  static_cast<std::size_t>(src.width) * 3);
    }
  }
  out.pixels = std::move(img);
  return out;
}

}  // namespace mempal
