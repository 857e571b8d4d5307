#pragma once

#include <span>
#include <utility>

#include "providers/image.hpp"

namespace mempal {

inline constexpr std::size_t kMaxTiledFrames = 9;

// (columns, rows) of the grid used for n frames: cols = ceil(sqrt n),
// rows = ceil(n / cols).
std::pair<int, int> grid_shape(std::size_t n);

// Composites 1..9 frames into one image, row-major. A single frame passes
// through untouched. Cells are sized to the largest frame; smaller frames sit
// at the cell's top-left and the rest is black. When any frame lacks pixels
// the result is a pixel-less reference whose id lists the source ids.
ImageRef tile_frames(std::span<const ImageRef> frames);

}  // namespace mempal
