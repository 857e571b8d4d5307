#include "eval/replay.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/text.hpp"
#include "engine/engine.hpp"

namespace mempal {

namespace {

namespace fs = std::filesystem;

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ScenarioInvalid, "cannot open '" + path.string() + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::ScenarioInvalid, "'" + path.string() + "' is not valid JSON");
  return j;
}

// A member holding either an inline document or a path to one.
nlohmann::json inline_or_file(const nlohmann::json& v, const fs::path& base) {
  if (v.is_string()) return read_json_file(base / v.get<std::string>());
  return v;
}

MockLatency latency_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  return {j[key].value("mean_s", 0.0), j[key].value("sd_s", 0.0)};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) fail(ErrorCode::ScenarioInvalid, "scenario must be a JSON object");
  Scenario s;
  try {
    s.name = j.value("name", std::string("scenario"));
    s.seed = j.value("seed", s.seed);
    s.participants = j.value("participants", s.participants);
    s.utc_offset_minutes = j.value("utc_offset_minutes", 0);

    const auto& home = j.at("home");
    if (home.contains("room_map")) {
      s.room_map = room_map_from_json(inline_or_file(home["room_map"], base_dir));
    } else if (home.contains("walkthrough")) {
      s.walkthrough = walkthrough_from_json(inline_or_file(home["walkthrough"], base_dir));
    } else {
      fail(ErrorCode::ScenarioInvalid, "home needs a room_map or a walkthrough");
    }

    const auto& batches = j.at("batches");
    if (batches.is_string()) {
      s.batches = read_batches_jsonl(base_dir / batches.get<std::string>());
    } else {
      for (const auto& b : batches) s.batches.push_back(batch_from_json(b, base_dir.string()));
    }
    for (const auto& o : j.at("objects")) s.objects.push_back(normalize_object_phrase(o.get<std::string>()));
    for (const auto& t : j.at("trials")) s.trials.push_back(trial_from_json(t));

    if (j.contains("latency")) {
      const auto& l = j["latency"];
      s.latency = {latency_from(l, "preprocess"), latency_from(l, "image_embedder"),
                   latency_from(l, "text_embedder"), latency_from(l, "vlm"), latency_from(l, "llm")};
    }
    if (j.contains("searcher")) {
      const auto& m = j["searcher"];
      s.searcher.recall_probability = m.value("recall_probability", s.searcher.recall_probability);
      s.searcher.truth_weight = m.value("truth_weight", s.searcher.truth_weight);
      s.searcher.miss_probability = m.value("miss_probability", s.searcher.miss_probability);
      s.searcher.seconds_per_room = m.value("seconds_per_room", s.searcher.seconds_per_room);
      s.searcher.cap_seconds = m.value("cap_seconds", s.searcher.cap_seconds);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ScenarioInvalid, std::string("malformed scenario: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ScenarioInvalid) throw;
    fail(ErrorCode::ScenarioInvalid, std::string("scenario: ") + e.what());
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const fs::path& path) {
  return scenario_from_json(read_json_file(path), path.parent_path());
}

std::vector<std::string> scenario_rooms(const Scenario& s) {
  if (s.room_map) return s.room_map->labels();
  std::vector<std::string> out;
  if (s.walkthrough) {
    for (const auto& l : s.walkthrough->labels) {
      const auto n = normalize_label(l.label);
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
  }
  return out;
}

void validate_scenario(const Scenario& s) {
  if (!s.room_map && !s.walkthrough) fail(ErrorCode::ScenarioInvalid, "scenario has no home");
  if (s.batches.empty()) fail(ErrorCode::ScenarioInvalid, "scenario has no frame batches");
  if (s.participants == 0) fail(ErrorCode::ScenarioInvalid, "scenario needs at least one participant");
  const auto rooms = scenario_rooms(s);
  const std::set<std::string> objects(s.objects.begin(), s.objects.end());
  Timestamp last = s.batches.front().captured_at;
  for (const auto& b : s.batches) last = std::max(last, b.captured_at);
  std::set<std::string> ids;
  for (const auto& t : s.trials) {
    if (!ids.insert(t.id).second) fail(ErrorCode::ScenarioInvalid, "duplicate trial id '" + t.id + "'");
    if (!objects.count(t.object)) {
      fail(ErrorCode::ScenarioInvalid, "trial '" + t.id + "' asks about '" + t.object + "', which is not listed");
    }
    if (std::find(rooms.begin(), rooms.end(), t.truth_location) == rooms.end()) {
      fail(ErrorCode::ScenarioInvalid, "trial '" + t.id + "' names unknown room '" + t.truth_location + "'");
    }
    if (t.asked_at && *t.asked_at < last) {
      fail(ErrorCode::ScenarioInvalid, "trial '" + t.id + "' is asked before the last frame batch");
    }
    if (t.asked_at && t.placed_at && *t.placed_at > *t.asked_at) {
      fail(ErrorCode::ScenarioInvalid, "trial '" + t.id + "' is asked before its object was placed");
    }
  }
}

ReplayResult replay(const Scenario& scenario, const fs::path& out_dir) {
  validate_scenario(scenario);

  EngineConfig cfg;
  cfg.virtual_time = true;
  cfg.seed = scenario.seed;
  cfg.retain_images = true;
  cfg.image_capacity = scenario.batches.size();
  cfg.trajectory.kind = TrajectorySinkConfig::Kind::Memory;
  cfg.query.utc_offset_minutes = scenario.utc_offset_minutes;
  cfg.ingest.preprocess_latency = scenario.latency.preprocess;
  cfg.image_embedder.latency = scenario.latency.image_embedder;
  cfg.text_embedder.latency = scenario.latency.text_embedder;
  cfg.vlm.latency = scenario.latency.vlm;
  cfg.llm.latency = scenario.latency.llm;
  if (scenario.room_map) {
    cfg.dim = scenario.room_map->dim();
  } else if (!scenario.walkthrough->frames.empty()) {
    cfg.dim = scenario.walkthrough->frames.front().embedding.dim();
  }
  Engine engine(cfg);
  if (scenario.room_map) {
    engine.install_map(*scenario.room_map);
  } else {
    engine.calibrate(*scenario.walkthrough);
  }

  ReplayResult out;
  Timestamp last = scenario.batches.front().captured_at;
  for (const auto& b : scenario.batches) {
    if (b.hands.value_or(false)) ++out.hands_true_batches;
    try {
      engine.ingest(b);
    } catch (const Error& e) {
      fail(ErrorCode::ScenarioInvalid, "batch '" + b.batch_id + "': " + e.what());
    }
    last = std::max(last, b.captured_at);
  }
  engine.flush();
  out.vlm_provider_calls = engine.vlm_provider_calls();

  const auto rooms = engine.room_map().labels();
  const auto diary = engine.diary().snapshot();
  std::ostringstream answers;
  std::vector<SearchTask> tasks;
  std::vector<AssistantOutcome> outcomes;
  std::map<std::string, std::size_t> class_counts;
  for (std::size_t i = 0; i < scenario.trials.size(); ++i) {
    const Trial& trial = scenario.trials[i];
    nlohmann::json line = {{"trial_id", trial.id},
                           {"condition", to_string(trial.condition)},
                           {"object", trial.object},
                           {"truth_location", trial.truth_location}};
    if (trial.condition == Condition::Baseline) {
      answers << line.dump() << "\n";
      continue;
    }
    const Timestamp asked = trial.asked_at.value_or(last + std::chrono::minutes(1 + static_cast<int>(i)));
    Answer answer;
    if (trial.condition == Condition::MemPal) {
      line["query"] = trial_query(trial);
      answer = engine.query("trial-" + trial.id, trial_query(trial), asked);
      line["answer"] = answer_to_json(answer);
    } else {
      try {
        const VisualAid aid = engine.visual_aid(trial.object);
        line["visual_aid"] = {{"record_id", aid.record_id.value},
                              {"detected_label", aid.detected_label},
                              {"location", aid.location},
                              {"image", aid.tiled_image.id},
                              {"t", format_rfc3339(aid.timestamp)}};
      } catch (const Error& e) {
        line["visual_aid"] = {{"error", std::string(to_string(e.code()))}};
      }
    }
    const TrialClass cls = classify_trial(answer, diary, trial);
    line["classification"] = to_string(cls);
    answers << line.dump() << "\n";
    ++class_counts[std::string(to_string(cls))];
    out.annotations.push_back({trial.id, trial.condition, cls});

    if (trial.condition == Condition::MemPal) {
      const RecordPtr r = decisive_record(answer, diary, trial);
      tasks.push_back({trial.object, trial.truth_location});
      outcomes.push_back({cls, r ? r->location : std::string()});
    }
  }

  out.diary_jsonl = engine.export_jsonl();
  out.answers_jsonl = answers.str();
  for (const auto& row : engine.trajectory()) out.trajectory_jsonl += trajectory_row_to_json(row).dump() + "\n";

  const IngestMetrics m = engine.ingest_metrics();
  nlohmann::json summary;
  summary["scenario"] = scenario.name;
  summary["seed"] = scenario.seed;
  summary["rooms"] = rooms;
  summary["objects"] = scenario.objects.size();
  summary["ingest"] = {{"batches", m.batches},
                       {"hands_true_batches", out.hands_true_batches},
                       {"gated", m.gated},
                       {"vlm_calls", out.vlm_provider_calls},
                       {"records", m.records},
                       {"skipped", m.skipped}};
  summary["trials"] = scenario.trials.size();
  summary["classes"] = class_counts;

  std::ostringstream report;
  report << "Scenario " << scenario.name << ": " << m.batches << " batches, " << m.records << " records, "
         << out.vlm_provider_calls << " VLM calls\n\n";

  const Denominators d = denominators_from(out.annotations);
  if (d.mempal > 0 && d.visual > 0) {
    const auto table = accuracy_table(out.annotations, d);
    summary["accuracy"] = accuracy_table_to_json(table);
    report << "Object retrieval accuracy\n" << render_accuracy_table(table) << "\n";
  } else {
    summary["accuracy"] = nullptr;
  }

  if (!tasks.empty()) {
    const auto search = run_search_experiment(rooms, tasks, outcomes, scenario.participants, scenario.searcher,
                                              scenario.seed);
    summary["search"] = to_json_value(search);
    char buf[256];
    std::snprintf(buf, sizeof buf, "Simulated search: baseline path %.3f (accuracy %.3f), assisted path %.3f (accuracy %.3f)\n\n",
                  search.baseline.mean_path_length, search.baseline.accuracy, search.assisted.mean_path_length,
                  search.assisted.accuracy);
    report << buf;
  } else {
    summary["search"] = nullptr;
  }

  const LatencyReport lat = engine.latency();
  summary["latency"] = latency_report_to_json(lat);
  report << "Device processing time\n" << render_latency_report(lat);

  out.summary = summary;
  out.report = report.str();

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(out_dir / "diary.jsonl", out.diary_jsonl);
    write_file(out_dir / "answers.jsonl", out.answers_jsonl);
    write_file(out_dir / "trajectory.jsonl", out.trajectory_jsonl);
    write_file(out_dir / "summary.json", out.summary.dump(2) + "\n");
    write_file(out_dir / "report.txt", out.report);
  }
  return out;
}

}  // namespace mempal
