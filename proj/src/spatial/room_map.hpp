#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "common/time.hpp"
#include "providers/embedding.hpp"

namespace mempal {

inline constexpr std::string_view kUnknownRoom = "unknown";
inline constexpr int kRoomMapSchemaVersion = 1;

struct Room {
  std::string label;
  std::vector<EmbeddingVector> centroids;
};

using Adjacency = std::map<std::string, std::set<std::string>>;

// Per-home spatial model. The constructor enforces: labels unique and
// non-empty after normalization, every room has at least one centroid, all
// centroids share one dim, adjacency only names known rooms. Adjacency is
// stored symmetric: an edge given one way is added both ways.
class RoomMap {
 public:
  RoomMap(std::vector<Room> rooms, Adjacency adjacency, std::string calibration_id, Timestamp created_at);

  const std::vector<Room>& rooms() const { return rooms_; }
  const Adjacency& adjacency() const { return adjacency_; }
  const std::string& calibration_id() const { return calibration_id_; }
  Timestamp created_at() const { return created_at_; }
  std::size_t dim() const { return dim_; }

  std::vector<std::string> labels() const;
  bool has_room(std::string_view label) const;
  bool adjacent(std::string_view a, std::string_view b) const;

  // Renames a room everywhere, adjacency included. Throws NotFound for an
  // unknown old label and InvalidArgument if the new label is taken.
  void rename(std::string_view old_label, std::string_view new_label);

 private:
  std::vector<Room> rooms_;
  Adjacency adjacency_;
  std::string calibration_id_;
  Timestamp created_at_;
  std::size_t dim_ = 0;
};

// Versioned JSON document: {version, calibration_id, created_at,
// rooms: [{label, centroids: [[...]]}], adjacency: {label: [labels]}}.
nlohmann::json room_map_to_json(const RoomMap& map);
RoomMap room_map_from_json(const nlohmann::json& j);

}  // namespace mempal
