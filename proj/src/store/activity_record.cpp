#include "store/activity_record.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace mempal {

bool ActivityRecord::mentions(std::string_view object) const {
  return std::find(objects_in_hand.begin(), objects_in_hand.end(), object) != objects_in_hand.end();
}

std::string compose_record_text(const std::string& activity, const std::vector<std::string>& objects,
                                const std::string& location, const std::string& background) {
  return activity + " | objects: " + join(objects, ",") + " | at " + location + " | near " + background;
}

nlohmann::json record_to_json(const ActivityRecord& r) {
  return nlohmann::json{{"schema", kDiarySchemaVersion},
                        {"record_id", r.id.value},
                        {"session_id", r.session_id},
                        {"timestamp", format_rfc3339(r.timestamp)},
                        {"location", r.location},
                        {"activity", r.activity},
                        {"objects_in_hand", r.objects_in_hand},
                        {"background", r.background},
                        {"embedding", to_json_value(r.embedding)},
                        {"source_batch", r.source_batch}};
}

ActivityRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "diary line is not a JSON object");
  const int schema = j.value("schema", 0);
  if (schema != kDiarySchemaVersion) {
    fail(ErrorCode::InvalidArgument, "unsupported diary schema version " + std::to_string(schema));
  }
  try {
    ActivityRecord r;
    r.id = RecordId{j.at("record_id").get<std::uint64_t>()};
    r.session_id = j.value("session_id", std::string("default"));
    r.timestamp = timestamp_from_json(j.at("timestamp"));
    r.location = j.at("location").get<std::string>();
    r.activity = j.at("activity").get<std::string>();
    r.objects_in_hand = j.at("objects_in_hand").get<std::vector<std::string>>();
    r.background = j.at("background").get<std::string>();
    r.embedding = embedding_from_json(j.at("embedding"));
    r.source_batch = j.value("source_batch", std::string());
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed diary line: ") + e.what());
  }
}

}  // namespace mempal
