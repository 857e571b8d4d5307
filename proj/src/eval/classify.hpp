#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "common/time.hpp"
#include "query/engine.hpp"
#include "store/activities_db.hpp"

namespace mempal {

enum class Condition { Baseline, MemPal, Visual };
std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view s);

enum class TrialClass { Correct, IncorrectLocation, ObjectMisidentified, NoObjectDetected };
std::string_view to_string(TrialClass c);
TrialClass trial_class_from_string(std::string_view s);

struct Trial {
  std::string id;
  std::string object;
  std::string truth_location;
  std::string truth_background;
  Condition condition = Condition::MemPal;
  // When the object was put down; a sighting older than this is of an
  // earlier placement.
  std::optional<Timestamp> placed_at;
  std::optional<Timestamp> asked_at;
  // Spoken query; "Pal, where is my <object>?" when empty.
  std::string query;
};

nlohmann::json trial_to_json(const Trial& t);
Trial trial_from_json(const nlohmann::json& j);
std::string trial_query(const Trial& t);

struct TrialAnnotation {
  std::string trial_id;
  Condition condition = Condition::MemPal;
  TrialClass classification = TrialClass::Correct;
};
// {trial_id, condition, classification}
nlohmann::json annotation_to_json(const TrialAnnotation& a);
TrialAnnotation annotation_from_json(const nlohmann::json& j);

// Picks the record an answer stands on. For the Visual condition that is the
// last-seen image, i.e. the latest exact sighting; otherwise the record the
// answer cites.
RecordPtr decisive_record(const Answer& answer, const DiarySnapshot& diary, const Trial& trial);

// NoObjectDetected when no record lists the object; ObjectMisidentified when
// the decisive record is missing, does not list the object, or predates the
// placement; IncorrectLocation when its room differs from the truth;
// Correct otherwise.
TrialClass classify_trial(const Answer& answer, const DiarySnapshot& diary, const Trial& trial);

struct AccuracyCell {
  std::string column;
  std::size_t count = 0;
  std::size_t total = 0;
  int percent = 0;
};

// Trial counts per condition. `all` covers every assisted trial (MemPal and
// Visual).
struct Denominators {
  std::size_t mempal = 0;
  std::size_t visual = 0;
  std::size_t all = 0;
};
Denominators denominators_from(const std::vector<TrialAnnotation>& annotations);
// {mempal, visual, all?}; `all` defaults to mempal + visual.
Denominators denominators_from_json(const nlohmann::json& j);

// round(100 * count / total), halves rounded up. Throws ZeroDenominator and
// InvalidArgument when count > total.
int rounded_percent(std::size_t count, std::size_t total);

// Columns: Correct (MemPal), Correct (Visual), Incorrect location (MemPal),
// No object detected (MemPal + Visual), Object misidentified (MemPal).
// Throws ZeroDenominator, InvalidArgument when all != mempal + visual or a
// count exceeds its total.
std::vector<AccuracyCell> accuracy_table(const std::vector<TrialAnnotation>& annotations, const Denominators& d);

nlohmann::json accuracy_table_to_json(const std::vector<AccuracyCell>& table);
// Count / Total Count / Percent rows under the five column headers.
std::string render_accuracy_table(const std::vector<AccuracyCell>& table);

}  // namespace mempal
