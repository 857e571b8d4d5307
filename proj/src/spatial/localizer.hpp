#pragma once

#include <optional>
#include <string>

#include "common/time.hpp"
#include "spatial/room_map.hpp"

namespace mempal {

struct LocationEstimate {
  std::string room_label;  // a map label or kUnknownRoom
  double confidence = 0.0;
  Timestamp timestamp;

  friend bool operator==(const LocationEstimate&, const LocationEstimate&) = default;
};

struct LocalizerConfig {
  // A jump to a room not adjacent to the previous one needs the winner to
  // beat the runner-up room by more than this cosine margin.
  double hysteresis_margin = 0.05;
  // Below this best similarity the estimate is kUnknownRoom.
  double unknown_threshold = 0.2;
};

// Nearest-centroid room with adjacency smoothing. Confidence is the chosen
// room's best cosine clamped to [0, 1]. Throws DimMismatch.
LocationEstimate localize(const EmbeddingVector& frame_embedding, const RoomMap& map,
                          const std::optional<LocationEstimate>& previous, Timestamp at,
                          const LocalizerConfig& config = {});

}  // namespace mempal
