#include "eval/search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <nlohmann/json.hpp>

#include "common/error.hpp"

namespace mempal {

std::size_t path_length(const SearchTrace& trace) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < trace.rooms_visited.size(); ++i) {
    if (i == 0 || trace.rooms_visited[i] != trace.rooms_visited[i - 1]) ++n;
  }
  return n;
}

ErrorProfile ErrorProfile::reported() {
  const double rest = 1.0 - 0.72;
  const double weights = 22.0 + 24.0 + 12.0;
  return {0.72, rest * 22.0 / weights, rest * 24.0 / weights, rest * 12.0 / weights};
}

TrialClass ErrorProfile::draw(Rng& rng) const {
  const double sum = correct + incorrect_location + object_misidentified + no_object_detected;
  if (!(sum > 0.0) || correct < 0 || incorrect_location < 0 || object_misidentified < 0 || no_object_detected < 0) {
    fail(ErrorCode::ScenarioInvalid, "error profile needs non-negative rates with a positive sum");
  }
  double u = rng.uniform() * sum;
  if ((u -= correct) < 0) return TrialClass::Correct;
  if ((u -= incorrect_location) < 0) return TrialClass::IncorrectLocation;
  if ((u -= object_misidentified) < 0) return TrialClass::ObjectMisidentified;
  return TrialClass::NoObjectDetected;
}

std::size_t SearcherModel::room_budget() const {
  if (!(seconds_per_room > 0.0) || !(cap_seconds > 0.0)) {
    fail(ErrorCode::ScenarioInvalid, "search time constants must be positive");
  }
  return static_cast<std::size_t>(std::ceil(cap_seconds / seconds_per_room - 1e-9));
}

std::string_view to_string(Strategy s) {
  return s == Strategy::Baseline ? "baseline" : "audio_assisted";
}

namespace {

// Visits `room`; true when the object is spotted there.
bool visit(SearchTrace& trace, const std::string& room, const std::string& truth, double miss, Rng& rng) {
  trace.rooms_visited.push_back(room);
  return room == truth && !rng.bernoulli(miss);
}

// Weighted passes over the rooms until found or out of budget. The first
// pass skips `skip` (a room already searched).
void continue_search(SearchTrace& trace, const std::vector<std::string>& rooms, const std::string& truth,
                     const SearcherModel& model, Rng& rng, const std::string& skip) {
  const std::size_t budget = model.room_budget();
  bool first = true;
  while (!trace.found && trace.rooms_visited.size() < budget) {
    std::vector<std::string> pool;
    for (const auto& r : rooms) {
      if (first && r == skip) continue;
      if (!trace.rooms_visited.empty() && r == trace.rooms_visited.back() && rooms.size() > 1) continue;
      pool.push_back(r);
    }
    first = false;
    if (pool.empty()) pool = rooms;
    while (!pool.empty() && !trace.found && trace.rooms_visited.size() < budget) {
      double sum = 0.0;
      for (const auto& r : pool) sum += r == truth ? model.truth_weight : 1.0;
      double u = rng.uniform() * sum;
      std::size_t pick = pool.size() - 1;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        u -= pool[i] == truth ? model.truth_weight : 1.0;
        if (u < 0) {
          pick = i;
          break;
        }
      }
      const std::string room = pool[pick];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      trace.found = visit(trace, room, truth, model.miss_probability, rng);
    }
  }
}

void finish_trace(SearchTrace& trace, const SearcherModel& model) {
  trace.duration_s = std::min(model.cap_seconds, static_cast<double>(trace.rooms_visited.size()) * model.seconds_per_room);
}

void check_rooms(const std::vector<std::string>& rooms, const std::string& truth) {
  if (rooms.empty()) fail(ErrorCode::ScenarioInvalid, "search needs at least one room");
  if (std::find(rooms.begin(), rooms.end(), truth) == rooms.end()) {
    fail(ErrorCode::ScenarioInvalid, "truth room '" + truth + "' is not in the home");
  }
}

std::string random_wrong_room(const std::vector<std::string>& rooms, const std::string& truth, Rng& rng) {
  std::vector<std::string> wrong;
  for (const auto& r : rooms) {
    if (r != truth) wrong.push_back(r);
  }
  if (wrong.empty()) return truth;
  return wrong[rng.index(wrong.size())];
}

}  // namespace

SearchTrace simulate_baseline(const std::vector<std::string>& rooms, const std::string& truth,
                              const SearcherModel& model, Rng& rng) {
  check_rooms(rooms, truth);
  SearchTrace trace;
  if (rng.bernoulli(model.recall_probability)) {
    trace.rooms_visited.push_back(truth);
    trace.found = true;
  } else {
    continue_search(trace, rooms, truth, model, rng, {});
  }
  finish_trace(trace, model);
  return trace;
}

SearchTrace simulate_assisted(const std::vector<std::string>& rooms, const std::string& truth,
                              const AssistantOutcome& outcome, const SearcherModel& model, Rng& rng) {
  check_rooms(rooms, truth);
  SearchTrace trace;
  switch (outcome.classification) {
    case TrialClass::Correct:
      trace.rooms_visited.push_back(truth);
      trace.found = true;
      break;
    case TrialClass::IncorrectLocation:
    case TrialClass::ObjectMisidentified: {
      std::string named = outcome.named_room;
      if (named.empty() || std::find(rooms.begin(), rooms.end(), named) == rooms.end()) {
        named = outcome.classification == TrialClass::IncorrectLocation ? random_wrong_room(rooms, truth, rng)
                                                                        : rooms[rng.index(rooms.size())];
      }
      trace.found = visit(trace, named, truth, model.miss_probability, rng);
      if (!trace.found) continue_search(trace, rooms, truth, model, rng, named);
      break;
    }
    case TrialClass::NoObjectDetected:
      return simulate_baseline(rooms, truth, model, rng);
  }
  finish_trace(trace, model);
  return trace;
}

namespace {

ExperimentSummary run_experiment(const std::vector<std::string>& rooms, const std::vector<SearchTask>& tasks,
                                 std::size_t participants, const SearcherModel& model, std::uint64_t seed,
                                 const std::function<AssistantOutcome(std::size_t, Rng&)>& outcome_for) {
  if (rooms.empty()) fail(ErrorCode::ScenarioInvalid, "experiment needs rooms");
  if (tasks.empty()) fail(ErrorCode::ScenarioInvalid, "experiment needs search tasks");
  if (participants == 0) fail(ErrorCode::ScenarioInvalid, "experiment needs participants");
  for (const auto& t : tasks) check_rooms(rooms, t.truth_location);

  Rng rng(mix64(seed));
  std::size_t base_found = 0, assist_found = 0, base_len = 0, assist_len = 0;
  for (std::size_t p = 0; p < participants; ++p) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto b = simulate_baseline(rooms, tasks[i].truth_location, model, rng);
      const AssistantOutcome outcome = outcome_for(i, rng);
      const auto a = simulate_assisted(rooms, tasks[i].truth_location, outcome, model, rng);
      base_found += b.found;
      assist_found += a.found;
      base_len += path_length(b);
      assist_len += path_length(a);
    }
  }
  const std::size_t n = participants * tasks.size();
  const double dn = static_cast<double>(n);
  ExperimentSummary s;
  s.baseline = {static_cast<double>(base_found) / dn, static_cast<double>(base_len) / dn, n};
  s.assisted = {static_cast<double>(assist_found) / dn, static_cast<double>(assist_len) / dn, n};
  return s;
}

}  // namespace

ExperimentSummary run_search_experiment(const std::vector<std::string>& rooms, const std::vector<SearchTask>& tasks,
                                        std::size_t participants, const ErrorProfile& profile,
                                        const SearcherModel& model, std::uint64_t seed) {
  return run_experiment(rooms, tasks, participants, model, seed,
                        [&](std::size_t, Rng& rng) { return AssistantOutcome{profile.draw(rng), {}}; });
}

ExperimentSummary run_search_experiment(const std::vector<std::string>& rooms, const std::vector<SearchTask>& tasks,
                                        const std::vector<AssistantOutcome>& outcomes, std::size_t participants,
                                        const SearcherModel& model, std::uint64_t seed) {
  if (outcomes.size() != tasks.size()) fail(ErrorCode::ScenarioInvalid, "one assistant outcome per task");
  return run_experiment(rooms, tasks, participants, model, seed,
                        [&](std::size_t i, Rng&) { return outcomes[i]; });
}

MonteCarloSummary run_monte_carlo(const std::vector<std::string>& rooms, const std::vector<SearchTask>& tasks,
                                  std::size_t participants, const ErrorProfile& profile, const SearcherModel& model,
                                  std::size_t experiments, std::uint64_t seed) {
  MonteCarloSummary m;
  m.experiments = experiments;
  for (std::size_t e = 0; e < experiments; ++e) {
    const auto s = run_search_experiment(rooms, tasks, participants, profile, model, seed + e);
    if (s.assisted.mean_path_length < s.baseline.mean_path_length) ++m.assisted_shorter;
    m.baseline_mean_path += s.baseline.mean_path_length;
    m.assisted_mean_path += s.assisted.mean_path_length;
    m.baseline_accuracy += s.baseline.accuracy;
    m.assisted_accuracy += s.assisted.accuracy;
  }
  if (experiments) {
    const double n = static_cast<double>(experiments);
    m.baseline_mean_path /= n;
    m.assisted_mean_path /= n;
    m.baseline_accuracy /= n;
    m.assisted_accuracy /= n;
  }
  return m;
}

namespace {

nlohmann::json condition_json(const ConditionSummary& c) {
  return {{"accuracy", c.accuracy}, {"mean_path_length", c.mean_path_length}, {"trials", c.trials}};
}

}  // namespace

nlohmann::json to_json_value(const ExperimentSummary& s) {
  return {{"baseline", condition_json(s.baseline)}, {"audio_assisted", condition_json(s.assisted)}};
}

nlohmann::json to_json_value(const MonteCarloSummary& s) {
  return {{"experiments", s.experiments},
          {"assisted_shorter", s.assisted_shorter},
          {"fraction_shorter", s.fraction_shorter()},
          {"baseline_mean_path", s.baseline_mean_path},
          {"assisted_mean_path", s.assisted_mean_path},
          {"baseline_accuracy", s.baseline_accuracy},
          {"assisted_accuracy", s.assisted_accuracy}};
}

}  // namespace mempal
