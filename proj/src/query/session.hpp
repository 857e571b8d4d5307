#pragma once

#include <deque>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "common/time.hpp"
#include "query/intent.hpp"
#include "store/activity_record.hpp"

namespace mempal {

inline constexpr std::size_t kDefaultSessionTurns = 20;

struct Turn {
  std::string query;
  std::string answer;
  Intent intent;
  Timestamp t;
  // Object the turn was about (carried into follow-ups) and the record the
  // answer cited, if any.
  std::optional<std::string> object;
  std::optional<RecordId> supporting_record;
};

nlohmann::json turn_to_json(const Turn& t);
Turn turn_from_json(const nlohmann::json& j);

// Bounded, time-ordered chat memory. Not thread-safe; one session is driven
// by one caller at a time.
class ChatSession {
 public:
  explicit ChatSession(std::string id = "default", std::size_t max_turns = kDefaultSessionTurns);

  const std::string& id() const { return id_; }
  std::size_t max_turns() const { return max_turns_; }
  const std::deque<Turn>& turns() const { return turns_; }
  bool empty() const { return turns_.empty(); }

  // Throws InvalidArgument if t precedes the last turn. Evicts the oldest
  // turn beyond the cap.
  void add_turn(Turn turn);

  // Most recent turn that named an object.
  const Turn* last_object_turn() const;

 private:
  std::string id_;
  std::size_t max_turns_;
  std::deque<Turn> turns_;
};

}  // namespace mempal
