#include "eval/evaluate.hpp"

#include <cstdio>

#include "common/error.hpp"
#include "eval/replay.hpp"

namespace mempal {

namespace {

nlohmann::json evaluate_annotations(const nlohmann::json& request) {
  std::vector<TrialAnnotation> annotations;
  for (const auto& a : request.at("annotations")) annotations.push_back(annotation_from_json(a));
  const Denominators d =
      request.contains("denominators") ? denominators_from_json(request["denominators"]) : denominators_from(annotations);
  const auto table = accuracy_table(annotations, d);
  return {{"accuracy", accuracy_table_to_json(table)}, {"report", render_accuracy_table(table)}};
}

ErrorProfile profile_named(const std::string& name, const std::vector<TrialAnnotation>& annotations) {
  if (name == "reported") return ErrorProfile::reported();
  if (name == "all_correct") return ErrorProfile::all_correct();
  if (name == "replay") {
    ErrorProfile p{0, 0, 0, 0};
    for (const auto& a : annotations) {
      if (a.condition != Condition::MemPal) continue;
      switch (a.classification) {
        case TrialClass::Correct: p.correct += 1; break;
        case TrialClass::IncorrectLocation: p.incorrect_location += 1; break;
        case TrialClass::ObjectMisidentified: p.object_misidentified += 1; break;
        case TrialClass::NoObjectDetected: p.no_object_detected += 1; break;
      }
    }
    if (!(p.correct + p.incorrect_location + p.object_misidentified + p.no_object_detected > 0)) {
      fail(ErrorCode::NoData, "the replay produced no assisted answers");
    }
    return p;
  }
  fail(ErrorCode::InvalidArgument, "unknown error profile '" + name + "'");
}

}  // namespace

nlohmann::json evaluate(const nlohmann::json& request) {
  if (!request.is_object()) fail(ErrorCode::InvalidArgument, "eval request must be a JSON object");
  if (request.contains("annotations")) return evaluate_annotations(request);
  if (!request.contains("scenario")) fail(ErrorCode::InvalidArgument, "eval needs \"annotations\" or \"scenario\"");

  Scenario scenario = load_scenario(request["scenario"].get<std::string>());
  if (request.contains("seed")) scenario.seed = request["seed"].get<std::uint64_t>();
  if (request.contains("participants")) scenario.participants = request["participants"].get<std::size_t>();
  const ReplayResult r = replay(scenario);

  const std::string profile_name = request.value("profile", std::string("reported"));
  const std::size_t experiments = request.value("experiments", std::size_t{100});
  const ErrorProfile profile = profile_named(profile_name, r.annotations);

  std::vector<SearchTask> tasks;
  for (const auto& t : scenario.trials) {
    if (t.condition == Condition::MemPal) tasks.push_back({t.object, t.truth_location});
  }
  if (tasks.empty()) {
    for (const auto& t : scenario.trials) tasks.push_back({t.object, t.truth_location});
  }
  const auto mc = run_monte_carlo(scenario_rooms(scenario), tasks, scenario.participants, profile, scenario.searcher,
                                  experiments, scenario.seed);

  nlohmann::json out = r.summary;
  out["monte_carlo"] = to_json_value(mc);
  out["monte_carlo"]["profile"] = profile_name;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "Monte Carlo (%s answers, %zu experiments): baseline path %.3f, assisted path %.3f, assisted shorter in "
                "%zu/%zu\n",
                profile_name.c_str(), mc.experiments, mc.baseline_mean_path, mc.assisted_mean_path,
                mc.assisted_shorter, mc.experiments);
  out["report"] = r.report + "\n" + buf;
  return out;
}

}  // namespace mempal
