#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "common/time.hpp"
#include "spatial/room_map.hpp"

namespace mempal {

struct TimedEmbedding {
  Timestamp t;
  EmbeddingVector embedding;
};

// A spoken room label from the house tour.
struct LabelEvent {
  Timestamp t;
  std::string label;
};

// Frames attributed to one label. `end` is exclusive.
struct CalibrationSegment {
  std::string label;
  std::vector<EmbeddingVector> frame_embeddings;
  Timestamp start;
  Timestamp end;
};

// Splits a time-ordered walkthrough at each label event. A segment runs from
// its label to the next label (the last one to the end of the stream);
// frames before the first label are dropped.
// Throws NoLabels, LabelsOutOfOrder, or InvalidArgument (unordered frames,
// labels outside the frame range, a label with no frames).
std::vector<CalibrationSegment> segment_walkthrough(const std::vector<TimedEmbedding>& frames,
                                                    const std::vector<LabelEvent>& label_events);

// k for one segment: min(3, ceil(frames / 20)).
std::size_t centroid_count(std::size_t frames);

// Deterministic Lloyd k-means (farthest-first seeding from the first point).
// Returns L2-normalized centroids.
std::vector<EmbeddingVector> kmeans_centroids(const std::vector<EmbeddingVector>& points, std::size_t k);

// One room per distinct normalized label, centroids pooled from every visit,
// an edge between each pair of labels consecutive in the walkthrough.
// Throws EmptySegments.
RoomMap build_room_map(const std::vector<CalibrationSegment>& segments);

struct Walkthrough {
  std::vector<TimedEmbedding> frames;
  std::vector<LabelEvent> labels;
};

// {"frames": [{"t", "embedding"}], "labels": [{"t", "label"}]}
Walkthrough walkthrough_from_json(const nlohmann::json& j);
nlohmann::json walkthrough_to_json(const Walkthrough& w);

}  // namespace mempal
