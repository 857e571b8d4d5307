#include "eval/classify.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace mempal {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::Baseline: return "baseline";
    case Condition::MemPal: return "mempal";
    case Condition::Visual: return "visual";
  }
  return "mempal";
}

Condition condition_from_string(std::string_view s) {
  const std::string n = to_lower(trim(s));
  if (n == "baseline") return Condition::Baseline;
  if (n == "mempal" || n == "audio") return Condition::MemPal;
  if (n == "visual") return Condition::Visual;
  fail(ErrorCode::InvalidArgument, "unknown condition '" + std::string(s) + "'");
}

std::string_view to_string(TrialClass c) {
  switch (c) {
    case TrialClass::Correct: return "correct";
    case TrialClass::IncorrectLocation: return "incorrect_location";
    case TrialClass::ObjectMisidentified: return "object_misidentified";
    case TrialClass::NoObjectDetected: return "no_object_detected";
  }
  return "correct";
}

TrialClass trial_class_from_string(std::string_view s) {
  if (s == "correct") return TrialClass::Correct;
  if (s == "incorrect_location") return TrialClass::IncorrectLocation;
  if (s == "object_misidentified") return TrialClass::ObjectMisidentified;
  if (s == "no_object_detected") return TrialClass::NoObjectDetected;
  fail(ErrorCode::InvalidArgument, "unknown trial class '" + std::string(s) + "'");
}

nlohmann::json trial_to_json(const Trial& t) {
  nlohmann::json j = {{"id", t.id},
                      {"object", t.object},
                      {"truth_location", t.truth_location},
                      {"truth_background", t.truth_background},
                      {"condition", to_string(t.condition)}};
  if (t.placed_at) j["placed_at"] = format_rfc3339(*t.placed_at);
  if (t.asked_at) j["asked_at"] = format_rfc3339(*t.asked_at);
  if (!t.query.empty()) j["query"] = t.query;
  return j;
}

Trial trial_from_json(const nlohmann::json& j) {
  Trial t;
  try {
    t.id = j.at("id").get<std::string>();
    t.object = normalize_object_phrase(j.at("object").get<std::string>());
    t.truth_location = normalize_label(j.at("truth_location").get<std::string>());
    t.truth_background = j.value("truth_background", std::string());
    t.condition = condition_from_string(j.value("condition", std::string("mempal")));
    if (j.contains("placed_at")) t.placed_at = timestamp_from_json(j["placed_at"]);
    if (j.contains("asked_at")) t.asked_at = timestamp_from_json(j["asked_at"]);
    t.query = j.value("query", std::string());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ScenarioInvalid, std::string("malformed trial: ") + e.what());
  }
  if (t.object.empty()) fail(ErrorCode::ScenarioInvalid, "trial '" + t.id + "' has no object");
  return t;
}

std::string trial_query(const Trial& t) {
  return t.query.empty() ? "Pal, where is my " + t.object + "?" : t.query;
}

RecordPtr decisive_record(const Answer& answer, const DiarySnapshot& diary, const Trial& trial) {
  if (trial.condition == Condition::Visual) {
    const auto exact = diary.filter_exact(trial.object);
    return exact.empty() ? nullptr : exact.back();
  }
  if (!answer.supporting_record) return nullptr;
  return diary.find(*answer.supporting_record);
}

TrialClass classify_trial(const Answer& answer, const DiarySnapshot& diary, const Trial& trial) {
  const std::string object = normalize_object_phrase(trial.object);
  if (diary.filter_exact(object).empty()) return TrialClass::NoObjectDetected;
  const RecordPtr r = decisive_record(answer, diary, trial);
  if (!r || !r->mentions(object)) return TrialClass::ObjectMisidentified;
  if (trial.placed_at && r->timestamp < *trial.placed_at) return TrialClass::ObjectMisidentified;
  if (normalize_label(r->location) != normalize_label(trial.truth_location)) return TrialClass::IncorrectLocation;
  return TrialClass::Correct;
}

nlohmann::json annotation_to_json(const TrialAnnotation& a) {
  return {{"trial_id", a.trial_id},
          {"condition", std::string(to_string(a.condition))},
          {"classification", std::string(to_string(a.classification))}};
}

TrialAnnotation annotation_from_json(const nlohmann::json& j) {
  TrialAnnotation a;
  try {
    a.trial_id = j.value("trial_id", std::string());
    a.condition = condition_from_string(j.at("condition").get<std::string>());
    a.classification = trial_class_from_string(j.at("classification").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ScenarioInvalid, std::string("malformed annotation: ") + e.what());
  }
  return a;
}

Denominators denominators_from_json(const nlohmann::json& j) {
  Denominators d;
  try {
    d.mempal = j.at("mempal").get<std::size_t>();
    d.visual = j.at("visual").get<std::size_t>();
    d.all = j.value("all", d.mempal + d.visual);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ScenarioInvalid, std::string("malformed denominators: ") + e.what());
  }
  return d;
}

Denominators denominators_from(const std::vector<TrialAnnotation>& annotations) {
  Denominators d;
  for (const auto& a : annotations) {
    if (a.condition == Condition::MemPal) ++d.mempal;
    if (a.condition == Condition::Visual) ++d.visual;
  }
  d.all = d.mempal + d.visual;
  return d;
}

int rounded_percent(std::size_t count, std::size_t total) {
  if (total == 0) fail(ErrorCode::ZeroDenominator, "percentage over an empty total");
  if (count > total) {
    fail(ErrorCode::InvalidArgument, "count " + std::to_string(count) + " exceeds total " + std::to_string(total));
  }
  return static_cast<int>((200 * count + total) / (2 * total));
}

std::vector<AccuracyCell> accuracy_table(const std::vector<TrialAnnotation>& annotations, const Denominators& d) {
  if (d.all != d.mempal + d.visual) {
    fail(ErrorCode::InvalidArgument, "all-trial total must equal MemPal + Visual totals");
  }
  auto count = [&](TrialClass cls, bool mempal, bool visual) {
    std::size_t n = 0;
    for (const auto& a : annotations) {
      if (a.classification != cls) continue;
      if ((a.condition == Condition::MemPal && mempal) || (a.condition == Condition::Visual && visual)) ++n;
    }
    return n;
  };
  std::vector<AccuracyCell> table = {
      {"Correct (MemPal)", count(TrialClass::Correct, true, false), d.mempal, 0},
      {"Correct (Visual)", count(TrialClass::Correct, false, true), d.visual, 0},
      {"Incorrect location", count(TrialClass::IncorrectLocation, true, false), d.mempal, 0},
      {"No object detected", count(TrialClass::NoObjectDetected, true, true), d.all, 0},
      {"Object misidentified", count(TrialClass::ObjectMisidentified, true, false), d.mempal, 0},
  };
  for (auto& c : table) c.percent = rounded_percent(c.count, c.total);
  return table;
}

nlohmann::json accuracy_table_to_json(const std::vector<AccuracyCell>& table) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : table) {
    out.push_back({{"column", c.column}, {"count", c.count}, {"total", c.total}, {"percent", c.percent}});
  }
  return out;
}

std::string render_accuracy_table(const std::vector<AccuracyCell>& table) {
  std::ostringstream os;
  const int label_w = 14;
  auto width = [](const AccuracyCell& c) { return static_cast<int>(std::max<std::size_t>(c.column.size(), 6)) + 2; };
  os << std::left << std::setw(label_w) << "";
  for (const auto& c : table) os << std::setw(width(c)) << c.column;
  os << "\n" << std::setw(label_w) << "Count";
  for (const auto& c : table) os << std::setw(width(c)) << c.count;
  os << "\n" << std::setw(label_w) << "Total Count";
  for (const auto& c : table) os << std::setw(width(c)) << c.total;
  os << "\n" << std::setw(label_w) << "Percent (%)";
  for (const auto& c : table) os << std::setw(width(c)) << (std::to_string(c.percent) + "%");
  os << "\n";
  return os.str();
}

}  // namespace mempal
