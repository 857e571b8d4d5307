#include "spatial/calibration.hpp"

#include <algorithm>
#include <limits>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace mempal {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<CalibrationSegment> segment_walkthrough(const std::vector<TimedEmbedding>& frames,
                                                    const std::vector<LabelEvent>& label_events) {
  if (label_events.empty()) fail(ErrorCode::NoLabels, "walkthrough has no room labels");
  if (frames.empty()) fail(ErrorCode::InvalidArgument, "walkthrough has no frames");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].t < frames[i - 1].t) fail(ErrorCode::InvalidArgument, "walkthrough frames are not time-ordered");
  }
  for (std::size_t i = 1; i < label_events.size(); ++i) {
    if (label_events[i].t <= label_events[i - 1].t) {
      fail(ErrorCode::LabelsOutOfOrder, "label '" + label_events[i].label + "' is not after '" +
                                            label_events[i - 1].label + "'");
    }
  }
  const auto first_t = frames.front().t;
  const auto last_t = frames.back().t;
  for (const auto& l : label_events) {
    if (l.t < first_t || l.t > last_t) {
      fail(ErrorCode::InvalidArgument, "label '" + l.label + "' lies outside the frame time range");
    }
    if (normalize_label(l.label).empty()) fail(ErrorCode::InvalidArgument, "empty room label");
  }

  std::vector<CalibrationSegment> segments;
  std::size_t f = 0;
  while (f < frames.size() && frames[f].t < label_events.front().t) ++f;
  for (std::size_t i = 0; i < label_events.size(); ++i) {
    CalibrationSegment seg;
    seg.label = normalize_label(label_events[i].label);
    seg.start = label_events[i].t;
    seg.end = i + 1 < label_events.size() ? label_events[i + 1].t : last_t + std::chrono::milliseconds{1};
    while (f < frames.size() && frames[f].t < seg.end) {
      seg.frame_embeddings.push_back(frames[f].embedding);
      ++f;
    }
    if (seg.frame_embeddings.empty()) {
      fail(ErrorCode::InvalidArgument, "label '" + seg.label + "' has no frames before the next label");
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::size_t centroid_count(std::size_t frames) { return std::min<std::size_t>(3, (frames + 19) / 20); }

std::vector<EmbeddingVector> kmeans_centroids(const std::vector<EmbeddingVector>& points, std::size_t k) {
  if (points.empty()) fail(ErrorCode::InvalidArgument, "k-means needs at least one point");
  k = std::clamp<std::size_t>(k, 1, points.size());
  const std::size_t dim = points.front().dim();

  std::vector<std::vector<double>> centers;
  centers.emplace_back(points.front().values().begin(), points.front().values().end());
  std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points[i].values(), centers.back()));
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    if (best_d <= 0.0) break;  // fewer distinct points than k
    centers.emplace_back(points[best].values().begin(), points[best].values().end());
  }

  std::vector<std::size_t> assign(points.size(), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::size_t arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = squared_distance(points[i].values(), centers[c]);
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      if (assign[i] != arg) changed = true;
      assign[i] = arg;
    }
    if (!changed) break;
    std::vector<std::vector<double>> sums(centers.size(), std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(centers.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto v = points[i].values();
      for (std::size_t d = 0; d < dim; ++d) sums[assign[i]][d] += v[d];
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (counts[c] == 0) continue;  // keep the previous center
      for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
  }

  std::vector<EmbeddingVector> out;
  for (auto& c : centers) {
    EmbeddingVector v(std::move(c));
    out.push_back(v.norm() > 0.0 ? v.normalized() : v);
  }
  return out;
}

RoomMap build_room_map(const std::vector<CalibrationSegment>& segments) {
  if (segments.empty()) fail(ErrorCode::EmptySegments, "no calibration segments");
  std::vector<Room> rooms;
  Adjacency adjacency;
  Timestamp created_at = segments.front().end;
  std::uint64_t digest = fnv1a64("mempal-calibration");
  std::string previous;
  for (const auto& seg : segments) {
    const auto label = normalize_label(seg.label);
    auto it = std::find_if(rooms.begin(), rooms.end(), [&](const Room& r) { return r.label == label; });
    if (it == rooms.end()) {
      rooms.push_back(Room{label, {}});
      it = std::prev(rooms.end());
    }
    for (auto& c : kmeans_centroids(seg.frame_embeddings, centroid_count(seg.frame_embeddings.size()))) {
      for (double x : c.values()) digest = fnv1a64(std::to_string(x), digest);
      it->centroids.push_back(std::move(c));
    }
    if (!previous.empty() && previous != label) {
      adjacency[previous].insert(label);
      adjacency[label].insert(previous);
    }
    previous = label;
    digest = fnv1a64(label, digest);
    created_at = std::max(created_at, seg.end);
  }
  return RoomMap(std::move(rooms), std::move(adjacency), "cal-" + hex64(digest).substr(0, 12), created_at);
}

Walkthrough walkthrough_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "walkthrough must be a JSON object");
  Walkthrough w;
  try {
    if (j.contains("frames")) {
      for (const auto& f : j["frames"]) {
        w.frames.push_back({timestamp_from_json(f.at("t")), embedding_from_json(f.at("embedding"))});
      }
    }
    if (j.contains("labels")) {
      for (const auto& l : j["labels"]) w.labels.push_back({timestamp_from_json(l.at("t")), l.at("label").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed walkthrough: ") + e.what());
  }
  return w;
}

nlohmann::json walkthrough_to_json(const Walkthrough& w) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : w.frames) frames.push_back({{"t", format_rfc3339(f.t)}, {"embedding", to_json_value(f.embedding)}});
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : w.labels) labels.push_back({{"t", format_rfc3339(l.t)}, {"label", l.label}});
  return {{"frames", frames}, {"labels", labels}};
}

}  // namespace mempal
