#include "query/intent.hpp"

#include <algorithm>
#include <regex>
#include <vector>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/log.hpp"
#include "common/text.hpp"
#include "providers/prompts.hpp"
#include "providers/providers.hpp"
#include "query/session.hpp"

namespace mempal {

namespace {

const std::vector<std::string>& trailing_fillers() {
  static const std::vector<std::string> kWords = {"again", "now", "please", "today", "anywhere", "at", "right",
                                                  "is", "are", "go", "went", "hey"};
  return kWords;
}

bool is_pronoun(std::string_view s) {
  return s == "it" || s == "them" || s == "that" || s == "those" || s == "this" || s == "these" || s == "one";
}

// Lowercase tokens joined by single spaces, wakeword removed.
std::string canonical_text(std::string_view transcript) {
  std::string s(transcript);
  for (std::size_t pos; (pos = s.find("\xE2\x80\x99")) != std::string::npos;) s.replace(pos, 3, "'");
  std::vector<std::string> kept;
  for (auto& tok : word_tokens(s)) {
    if (tok != "pal") kept.push_back(std::move(tok));
  }
  return join(kept, " ");
}

std::optional<std::string> clean_object(std::string raw) {
  auto toks = split(raw, ' ');
  while (!toks.empty() &&
         std::find(trailing_fillers().begin(), trailing_fillers().end(), toks.back()) != trailing_fillers().end()) {
    toks.pop_back();
  }
  auto phrase = normalize_object_phrase(join(toks, " "));
  if (phrase.empty() || is_pronoun(phrase)) return std::nullopt;
  return phrase;
}

struct Pattern {
  IntentCategory category;
  std::regex re;
};

const std::vector<Pattern>& patterns() {
  static const std::vector<Pattern> kPatterns = [] {
    const auto flags = std::regex::ECMAScript | std::regex::optimize;
    const std::string det = "(?:(?:my|the|our|your) )?";
    std::vector<Pattern> p;
    p.push_back({IntentCategory::Recall,
                 std::regex("(?:^| )what (?:did|was|were) i (?:do|doing) (?:right |just )?before i "
                            "(?:misplaced|lost|put down|put away|left|dropped|saw|last saw|put) " +
                                det + "(.+)$",
                            flags)});
    p.push_back({IntentCategory::ObjectLocation,
                 std::regex("(?:^| )where (?:is|are|was|were|did i (?:put|leave|place)|have i (?:put|left)) " + det +
                                "(.+)$",
                            flags)});
    p.push_back({IntentCategory::ObjectLocation, std::regex("(?:^| )wheres " + det + "(.+)$", flags)});
    p.push_back({IntentCategory::ObjectLocation,
                 std::regex("(?:^| )(?:cant|cannot|can not|couldnt) (?:find|locate|see) " + det + "(.+)$", flags)});
    p.push_back({IntentCategory::ObjectLocation, std::regex("(?:^| )looking for " + det + "(.+)$", flags)});
    p.push_back({IntentCategory::ObjectLocation, std::regex("(?:^| )have you seen " + det + "(.+)$", flags)});
    p.push_back({IntentCategory::ObjectLocation,
                 std::regex("(?:^| )(?:i )?(?:lost|misplaced) " + det + "(.+)$", flags)});
    return p;
  }();
  return kPatterns;
}

}  // namespace

std::string_view to_string(IntentCategory c) {
  switch (c) {
    case IntentCategory::ObjectLocation: return "object_location";
    case IntentCategory::FollowUp: return "follow_up";
    case IntentCategory::Recall: return "recall";
    case IntentCategory::Unknown: return "unknown";
  }
  return "unknown";
}

nlohmann::json intent_to_json(const Intent& i) {
  return {{"category", to_string(i.category)},
          {"object_phrase", i.object_phrase ? nlohmann::json(*i.object_phrase) : nlohmann::json(nullptr)},
          {"raw_text", i.raw_text},
          {"wakeword_present", i.wakeword_present}};
}

Intent intent_from_json(const nlohmann::json& j) {
  Intent i;
  const auto cat = j.value("category", std::string("unknown"));
  for (auto c : {IntentCategory::ObjectLocation, IntentCategory::FollowUp, IntentCategory::Recall}) {
    if (cat == to_string(c)) i.category = c;
  }
  if (j.contains("object_phrase") && !j["object_phrase"].is_null()) i.object_phrase = j["object_phrase"];
  i.raw_text = j.value("raw_text", std::string());
  i.wakeword_present = j.value("wakeword_present", false);
  return i;
}

bool has_wakeword(std::string_view transcript) {
  const auto toks = word_tokens(transcript);
  return std::find(toks.begin(), toks.end(), "pal") != toks.end();
}

RuleMatch match_rules(std::string_view transcript) {
  const std::string text = canonical_text(transcript);
  for (const auto& p : patterns()) {
    std::smatch m;
    if (std::regex_search(text, m, p.re)) return RuleMatch{p.category, clean_object(m[1].str())};
  }
  return {};
}

Intent parse_query(std::string_view transcript, const ChatSession& session, LanguageModel* fallback) {
  Intent intent;
  intent.raw_text = std::string(transcript);
  intent.wakeword_present = has_wakeword(transcript);
  if (trim(transcript).empty()) return intent;

  const RuleMatch rule = match_rules(transcript);
  if (rule.object) {
    intent.category = rule.category;
    intent.object_phrase = rule.object;
    return intent;
  }
  if (!session.empty()) {
    intent.category = IntentCategory::FollowUp;
    return intent;
  }
  if (rule.category != IntentCategory::Unknown || !fallback) return intent;

  try {
    const std::string prompt = std::string(kExtractObjectTask) +
                               "\nName the physical object the user is trying to find. Reply \"OBJECT: <name>\" "
                               "or \"NONE\".\n" +
                               std::string(kQuestionLabel) + " " + canonical_text(transcript);
    const std::string reply = trim(fallback->complete(prompt, {}));
    if (starts_with_ci(reply, "OBJECT:")) {
      if (auto obj = clean_object(to_lower(trim(reply.substr(7))))) {
        intent.category = IntentCategory::ObjectLocation;
        intent.object_phrase = obj;
      }
    }
  } catch (const Error& e) {
    log_warning(std::string("object extraction fallback failed: ") + e.what());
  }
  return intent;
}

}  // namespace mempal
