#include "spatial/room_map.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace mempal {

RoomMap::RoomMap(std::vector<Room> rooms, Adjacency adjacency, std::string calibration_id, Timestamp created_at)
    : rooms_(std::move(rooms)), calibration_id_(std::move(calibration_id)), created_at_(created_at) {
  if (rooms_.empty()) fail(ErrorCode::EmptyMap, "room map has no rooms");
  std::set<std::string> seen;
  for (auto& room : rooms_) {
    room.label = normalize_label(room.label);
    if (room.label.empty()) fail(ErrorCode::InvalidArgument, "room label must not be empty");
    if (room.label == kUnknownRoom) fail(ErrorCode::InvalidArgument, "'unknown' is reserved");
    if (!seen.insert(room.label).second) fail(ErrorCode::InvalidArgument, "duplicate room label '" + room.label + "'");
    if (room.centroids.empty()) fail(ErrorCode::InvalidArgument, "room '" + room.label + "' has no centroids");
    for (const auto& c : room.centroids) {
      if (dim_ == 0) dim_ = c.dim();
      if (c.dim() != dim_) fail(ErrorCode::DimMismatch, "room '" + room.label + "' centroid dim mismatch");
    }
  }
  for (auto& [key, neighbors] : adjacency) {
    const auto a = normalize_label(key);
    if (!seen.count(a)) fail(ErrorCode::InvalidArgument, "adjacency names unknown room '" + a + "'");
    for (const auto& n : neighbors) {
      const auto b = normalize_label(n);
      if (!seen.count(b)) fail(ErrorCode::InvalidArgument, "adjacency names unknown room '" + b + "'");
      if (a == b) continue;
      adjacency_[a].insert(b);
      adjacency_[b].insert(a);
    }
  }
}

std::vector<std::string> RoomMap::labels() const {
  std::vector<std::string> out;
  for (const auto& r : rooms_) out.push_back(r.label);
  return out;
}

bool RoomMap::has_room(std::string_view label) const {
  return std::any_of(rooms_.begin(), rooms_.end(), [&](const Room& r) { return r.label == label; });
}

bool RoomMap::adjacent(std::string_view a, std::string_view b) const {
  auto it = adjacency_.find(std::string(a));
  return it != adjacency_.end() && it->second.count(std::string(b)) > 0;
}

void RoomMap::rename(std::string_view old_label, std::string_view new_label) {
  const auto from = normalize_label(old_label);
  const auto to = normalize_label(new_label);
  if (!has_room(from)) fail(ErrorCode::NotFound, "no room labeled '" + from + "'");
  if (to.empty() || to == kUnknownRoom) fail(ErrorCode::InvalidArgument, "invalid room label '" + to + "'");
  if (from == to) return;
  if (has_room(to)) fail(ErrorCode::InvalidArgument, "room '" + to + "' already exists");
  for (auto& r : rooms_) {
    if (r.label == from) r.label = to;
  }
  Adjacency renamed;
  for (const auto& [key, neighbors] : adjacency_) {
    auto& dst = renamed[key == from ? to : key];
    for (const auto& n : neighbors) dst.insert(n == from ? to : n);
  }
  adjacency_ = std::move(renamed);
}

nlohmann::json room_map_to_json(const RoomMap& map) {
  nlohmann::json rooms = nlohmann::json::array();
  for (const auto& r : map.rooms()) {
    nlohmann::json centroids = nlohmann::json::array();
    for (const auto& c : r.centroids) centroids.push_back(to_json_value(c));
    rooms.push_back({{"label", r.label}, {"centroids", centroids}});
  }
  nlohmann::json adjacency = nlohmann::json::object();
  for (const auto& [k, v] : map.adjacency()) adjacency[k] = std::vector<std::string>(v.begin(), v.end());
  return {{"version", kRoomMapSchemaVersion},
          {"calibration_id", map.calibration_id()},
          {"created_at", format_rfc3339(map.created_at())},
          {"rooms", rooms},
          {"adjacency", adjacency}};
}

RoomMap room_map_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "room map must be a JSON object");
  if (j.value("version", 0) != kRoomMapSchemaVersion) {
    fail(ErrorCode::InvalidArgument, "unsupported room map version");
  }
  try {
    std::vector<Room> rooms;
    for (const auto& r : j.at("rooms")) {
      Room room;
      room.label = r.at("label").get<std::string>();
      for (const auto& c : r.at("centroids")) room.centroids.push_back(embedding_from_json(c));
      rooms.push_back(std::move(room));
    }
    Adjacency adjacency;
    if (j.contains("adjacency")) {
      for (const auto& [k, v] : j["adjacency"].items()) {
        for (const auto& n : v) adjacency[k].insert(n.get<std::string>());
      }
    }
    return RoomMap(std::move(rooms), std::move(adjacency), j.value("calibration_id", std::string()),
                   timestamp_from_json(j.at("created_at")));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed room map: ") + e.what());
  }
}

}  // namespace mempal
