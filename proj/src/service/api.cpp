#include "service/api.hpp"

#include <charconv>

#include "common/text.hpp"
#include "providers/image.hpp"

namespace mempal::api {

using nlohmann::json;

nlohmann::json calibrate(Engine& engine, const nlohmann::json& body) {
  if (body.is_object() && body.contains("room_map")) {
    engine.install_map(room_map_from_json(body["room_map"]));
    const RoomMap map = engine.room_map();
    return {{"calibration_id", map.calibration_id()}, {"rooms", map.labels()}};
  }
  const auto r = engine.calibrate(walkthrough_from_json(body.is_null() ? json::object() : body));
  return {{"calibration_id", r.calibration_id}, {"rooms", r.rooms}};
}

nlohmann::json calibration(const Engine& engine) {
  if (!engine.calibrated()) return {{"calibrated", false}, {"rooms", json::array()}, {"adjacency", json::object()}};
  const RoomMap map = engine.room_map();
  json rooms = json::array();
  json adjacency = json::object();
  for (const auto& label : map.labels()) {
    const std::string shown = engine.display_room(label);
    rooms.push_back(shown);
    json next = json::array();
    const auto it = map.adjacency().find(label);
    if (it != map.adjacency().end()) {
      for (const auto& n : it->second) next.push_back(engine.display_room(n));
    }
    adjacency[shown] = next;
  }
  return {{"calibrated", true}, {"calibration_id", map.calibration_id()}, {"rooms", rooms}, {"adjacency", adjacency}};
}

nlohmann::json rename_room(Engine& engine, const std::string& old_label, const nlohmann::json& body) {
  std::string next;
  if (body.is_object()) {
    for (const char* key : {"new", "label", "name"}) {
      if (body.contains(key) && body[key].is_string()) {
        next = body[key].get<std::string>();
        break;
      }
    }
  }
  if (trim(next).empty()) fail(ErrorCode::InvalidArgument, "rename needs {\"new\": label}");
  engine.rename_room(old_label, next);
  return calibration(engine);
}

nlohmann::json ingest(Engine& engine, const nlohmann::json& body, const std::string& frames_dir) {
  if (!body.is_object() || body.empty()) fail(ErrorCode::InvalidArgument, "empty frame batch");
  const auto r = engine.ingest(batch_from_json(body, frames_dir));
  return frame_result_to_json(r, engine.display_room(r.location.room_label));
}

nlohmann::json query(Engine& engine, const nlohmann::json& body) {
  if (!body.is_object()) fail(ErrorCode::InvalidArgument, "query body must be a JSON object");
  const std::string session = body.value("session_id", std::string("default"));
  std::optional<Timestamp> now;
  if (body.contains("t") && !body["t"].is_null()) now = timestamp_from_json(body["t"]);
  if (body.contains("audio")) {
    const json& audio = body["audio"];
    AudioRef ref;
    if (audio.contains("transcript")) ref.transcript = audio["transcript"].get<std::string>();
    if (audio.contains("data_base64")) ref.bytes = base64_decode(audio["data_base64"].get<std::string>());
    return answer_to_json(engine.query_audio(session, ref, now));
  }
  return answer_to_json(engine.query(session, body.value("transcript", std::string()), now));
}

nlohmann::json session(const Engine& engine, const std::string& session_id) {
  json turns = json::array();
  for (const auto& t : engine.session_turns(session_id)) turns.push_back(turn_to_json(t));
  return {{"session_id", session_id}, {"turns", turns}};
}

nlohmann::json activities(const Engine& engine, const ActivityFilter& filter) {
  const std::string object = filter.object.empty() ? "" : normalize_object_phrase(filter.object);
  const std::string room = filter.room.empty() ? "" : normalize_label(filter.room);
  json records = json::array();
  for (const auto& r : engine.activities(filter.since, filter.until)) {
    if (!object.empty() && !r->mentions(object)) continue;
    json j = engine.activity_json(*r);
    if (!room.empty() && normalize_label(j["location"].get<std::string>()) != room) continue;
    records.push_back(std::move(j));
  }
  return {{"records", records}};
}

nlohmann::json trajectory(const Engine& engine) {
  json rows = json::array();
  for (const auto& r : engine.trajectory()) rows.push_back(trajectory_row_to_json(r));
  return {{"rows", rows}};
}

nlohmann::json visual_aid(const Engine& engine, const std::string& object) {
  if (trim(object).empty()) fail(ErrorCode::InvalidArgument, "visual aid needs an object");
  const auto v = engine.visual_aid(object);
  json image = {{"id", v.tiled_image.id}, {"batch_id", v.tiled_image.tag}};
  if (v.tiled_image.has_pixels()) {
    image["format"] = "ppm";
    image["width"] = v.tiled_image.pixels->width;
    image["height"] = v.tiled_image.pixels->height;
    image["data_base64"] = base64_encode(encode_ppm(*v.tiled_image.pixels));
  } else {
    image["format"] = nullptr;
  }
  return {{"object", v.object},
          {"detected_label", v.detected_label},
          {"timestamp", format_rfc3339(v.timestamp)},
          {"record_id", v.record_id.value},
          {"location", v.location},
          {"tiled_image", image}};
}

Timestamp parse_time_param(const std::string& text) {
  double secs = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), secs);
  if (ec == std::errc() && end == text.data() + text.size()) return timestamp_from_json(secs);
  return parse_rfc3339(text);
}

}  // namespace mempal::api
