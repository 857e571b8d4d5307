#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "engine/engine.hpp"

namespace mempal::api {

// Engine operations on their wire documents. The HTTP service and the C API
// both go through these, so the two surfaces answer alike.

// Walkthrough {frames, labels}, or {room_map: {...}} to install a saved map.
// -> {calibration_id, rooms}
nlohmann::json calibrate(Engine& engine, const nlohmann::json& body);
// -> {calibrated, calibration_id?, rooms, adjacency}
nlohmann::json calibration(const Engine& engine);
// Body {new} (or {label}, {name}). -> calibration(engine)
nlohmann::json rename_room(Engine& engine, const std::string& old_label, const nlohmann::json& body);
// Frame batch -> {batch_id, accepted, hands, record_created, record_id, location, confidence, t, skipped}
nlohmann::json ingest(Engine& engine, const nlohmann::json& body, const std::string& frames_dir = {});
// {session_id?, transcript | audio: {transcript?, data_base64?}, t?} -> Answer
nlohmann::json query(Engine& engine, const nlohmann::json& body);
// -> {session_id, turns}
nlohmann::json session(const Engine& engine, const std::string& session_id);

struct ActivityFilter {
  std::optional<Timestamp> since;
  std::optional<Timestamp> until;
  std::string object;
  std::string room;
};
// -> {records: [...]}
nlohmann::json activities(const Engine& engine, const ActivityFilter& filter);
// -> {rows: [...]}
nlohmann::json trajectory(const Engine& engine);
// -> {object, detected_label, timestamp, record_id, location, tiled_image}
nlohmann::json visual_aid(const Engine& engine, const std::string& object);

// A time given as RFC 3339 text or as seconds since the epoch. Throws
// BadTimeRange.
Timestamp parse_time_param(const std::string& text);

}  // namespace mempal::api
