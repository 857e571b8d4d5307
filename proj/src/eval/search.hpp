#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "common/rng.hpp"
#include "eval/classify.hpp"

namespace mempal {

inline constexpr double kSearchCapSeconds = 180.0;

struct SearchTrace {
  std::vector<std::string> rooms_visited;
  bool found = false;
  double duration_s = 0.0;
};

// Room-entry events: consecutive duplicates collapse, re-entries count.
std::size_t path_length(const SearchTrace& trace);

// Probabilities of each answer class. Normalized on use.
struct ErrorProfile {
  double correct = 1.0;
  double incorrect_location = 0.0;
  double object_misidentified = 0.0;
  double no_object_detected = 0.0;

  static ErrorProfile all_correct() { return {}; }
  // 72 % correct; the remaining 28 % split over the three error classes in
  // proportion to their reported rates (22 : 24 : 12).
  static ErrorProfile reported();
  TrialClass draw(Rng& rng) const;
};

// Synthetic searcher. Without help the searcher sometimes simply remembers
// where the object went; otherwise rooms are tried in a random order that
// favours the true room, pass after pass, until the time cap.
struct SearcherModel {
  double recall_probability = 0.35;
  double truth_weight = 2.0;
  // Chance of overlooking the object while searching the right room.
  double miss_probability = 0.1;
  double seconds_per_room = 30.0;
  double cap_seconds = kSearchCapSeconds;

  std::size_t room_budget() const;
};

enum class Strategy { Baseline, AudioAssisted };
std::string_view to_string(Strategy s);

// What the assistant told the searcher. `named_room` is the room in the
// answer (empty when the assistant was not sure).
struct AssistantOutcome {
  TrialClass classification = TrialClass::Correct;
  std::string named_room;
};

SearchTrace simulate_baseline(const std::vector<std::string>& rooms, const std::string& truth,
                              const SearcherModel& model, Rng& rng);
// Goes to the named room first; a wrong or missing answer falls back to the
// unaided search.
SearchTrace simulate_assisted(const std::vector<std::string>& rooms, const std::string& truth,
                              const AssistantOutcome& outcome, const SearcherModel& model, Rng& rng);

struct SearchTask {
  std::string object;
  std::string truth_location;
};

struct ConditionSummary {
  double accuracy = 0.0;
  double mean_path_length = 0.0;
  std::size_t trials = 0;
};

struct ExperimentSummary {
  ConditionSummary baseline;
  ConditionSummary assisted;
};

// One experiment: every participant searches for every task once per
// strategy. Assistant answers are drawn from the profile. Throws
// ScenarioInvalid for no rooms, no tasks, or a truth room outside `rooms`.
ExperimentSummary run_search_experiment(const std::vector<std::string>& rooms, const std::vector<SearchTask>& tasks,
                                        std::size_t participants, const ErrorProfile& profile,
                                        const SearcherModel& model, std::uint64_t seed);

// Same, with the assistant's real answers: outcomes[i] belongs to tasks[i].
ExperimentSummary run_search_experiment(const std::vector<std::string>& rooms, const std::vector<SearchTask>& tasks,
                                        const std::vector<AssistantOutcome>& outcomes, std::size_t participants,
                                        const SearcherModel& model, std::uint64_t seed);

struct MonteCarloSummary {
  std::size_t experiments = 0;
  std::size_t assisted_shorter = 0;
  double baseline_mean_path = 0.0;
  double assisted_mean_path = 0.0;
  double baseline_accuracy = 0.0;
  double assisted_accuracy = 0.0;
  double fraction_shorter() const {
    return experiments ? static_cast<double>(assisted_shorter) / static_cast<double>(experiments) : 0.0;
  }
};

// `experiments` runs seeded seed, seed+1, ...
MonteCarloSummary run_monte_carlo(const std::vector<std::string>& rooms, const std::vector<SearchTask>& tasks,
                                  std::size_t participants, const ErrorProfile& profile, const SearcherModel& model,
                                  std::size_t experiments, std::uint64_t seed);

nlohmann::json to_json_value(const ExperimentSummary& s);
nlohmann::json to_json_value(const MonteCarloSummary& s);

}  // namespace mempal
