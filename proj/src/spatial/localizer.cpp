#include "spatial/localizer.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "store/activities_db.hpp"

namespace mempal {

LocationEstimate localize(const EmbeddingVector& frame_embedding, const RoomMap& map,
                          const std::optional<LocationEstimate>& previous, Timestamp at,
                          const LocalizerConfig& config) {
  if (map.rooms().empty()) fail(ErrorCode::EmptyMap, "room map is empty");
  if (frame_embedding.dim() != map.dim()) {
    fail(ErrorCode::DimMismatch, "frame embedding has dim " + std::to_string(frame_embedding.dim()) +
                                     ", room map dim is " + std::to_string(map.dim()));
  }

  struct Scored {
    const std::string* label;
    double score;
  };
  std::vector<Scored> scored;
  scored.reserve(map.rooms().size());
  for (const auto& room : map.rooms()) {
    double best = -1.0;
    for (const auto& c : room.centroids) best = std::max(best, cosine(frame_embedding, c));
    scored.push_back({&room.label, best});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

  const auto& top = scored.front();
  const double runner_up = scored.size() > 1 ? scored[1].score : -1.0;
  const auto clamp01 = [](double s) { return std::clamp(s, 0.0, 1.0); };

  if (top.score < config.unknown_threshold) {
    return {std::string(kUnknownRoom), clamp01(top.score), at};
  }

  if (previous && previous->room_label != kUnknownRoom && map.has_room(previous->room_label) &&
      *top.label != previous->room_label && !map.adjacent(previous->room_label, *top.label) &&
      !(top.score - runner_up > config.hysteresis_margin)) {
    const auto prev = std::find_if(scored.begin(), scored.end(),
                                   [&](const Scored& s) { return *s.label == previous->room_label; });
    return {previous->room_label, clamp01(prev->score), at};
  }
  return {*top.label, clamp01(top.score), at};
}

}  // namespace mempal
