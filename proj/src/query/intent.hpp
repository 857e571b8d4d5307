#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace mempal {

class ChatSession;
class LanguageModel;

enum class IntentCategory { ObjectLocation, FollowUp, Recall, Unknown };

std::string_view to_string(IntentCategory c);

struct Intent {
  IntentCategory category = IntentCategory::Unknown;
  std::optional<std::string> object_phrase;
  std::string raw_text;
  bool wakeword_present = false;

  friend bool operator==(const Intent&, const Intent&) = default;
};

nlohmann::json intent_to_json(const Intent& i);
Intent intent_from_json(const nlohmann::json& j);

// True iff a "pal" token appears (case-insensitive, punctuation stripped).
bool has_wakeword(std::string_view transcript);

// Rule patterns only. Returns the category and normalized object phrase
// ("it"/"them" are reported as no object).
struct RuleMatch {
  IntentCategory category = IntentCategory::Unknown;
  std::optional<std::string> object;
};
RuleMatch match_rules(std::string_view transcript);

// Rules first. A miss becomes a follow-up when the session already has
// turns, otherwise the language model (if given) is asked to name the
// object; a failed or empty extraction yields Unknown.
Intent parse_query(std::string_view transcript, const ChatSession& session, LanguageModel* fallback = nullptr);

}  // namespace mempal
