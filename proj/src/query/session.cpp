#include "query/session.hpp"

#include <nlohmann/json.hpp>

#include "common/error.hpp"

namespace mempal {

nlohmann::json turn_to_json(const Turn& t) {
  nlohmann::json j = {{"query", t.query}, {"answer", t.answer}, {"intent", intent_to_json(t.intent)},
                      {"t", format_rfc3339(t.t)}};
  j["object"] = t.object ? nlohmann::json(*t.object) : nlohmann::json(nullptr);
  j["supporting_record"] = t.supporting_record ? nlohmann::json(t.supporting_record->value) : nlohmann::json(nullptr);
  return j;
}

Turn turn_from_json(const nlohmann::json& j) {
  try {
    Turn t;
    t.query = j.at("query").get<std::string>();
    t.answer = j.at("answer").get<std::string>();
    t.intent = intent_from_json(j.at("intent"));
    t.t = timestamp_from_json(j.at("t"));
    if (j.contains("object") && !j["object"].is_null()) t.object = j["object"].get<std::string>();
    if (j.contains("supporting_record") && !j["supporting_record"].is_null()) {
      t.supporting_record = RecordId{j["supporting_record"].get<std::uint64_t>()};
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed chat turn: ") + e.what());
  }
}

ChatSession::ChatSession(std::string id, std::size_t max_turns) : id_(std::move(id)), max_turns_(max_turns) {
  if (max_turns_ == 0) fail(ErrorCode::InvalidArgument, "session turn cap must be positive");
}

void ChatSession::add_turn(Turn turn) {
  if (!turns_.empty() && turn.t < turns_.back().t) {
    fail(ErrorCode::InvalidArgument, "chat turns must be time-ordered");
  }
  turns_.push_back(std::move(turn));
  while (turns_.size() > max_turns_) turns_.pop_front();
}

const Turn* ChatSession::last_object_turn() const {
  for (auto it = turns_.rbegin(); it != turns_.rend(); ++it) {
    if (it->object) return &*it;
  }
  return nullptr;
}

}  // namespace mempal
