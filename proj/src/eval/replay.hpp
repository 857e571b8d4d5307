#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eval/classify.hpp"
#include "eval/search.hpp"
#include "ingest/frame_batch.hpp"
#include "spatial/calibration.hpp"
#include "spatial/room_map.hpp"

namespace mempal {

// Mock latencies a replay spends on its virtual clock.
struct ScenarioLatency {
  MockLatency preprocess;
  MockLatency image_embedder;
  MockLatency text_embedder;
  MockLatency vlm;
  MockLatency llm;
};

struct Scenario {
  std::string name;
  std::optional<RoomMap> room_map;
  std::optional<Walkthrough> walkthrough;
  std::vector<FrameBatch> batches;
  std::vector<std::string> objects;
  std::vector<Trial> trials;
  std::uint64_t seed = 7;
  std::size_t participants = 15;
  int utc_offset_minutes = 0;
  SearcherModel searcher;
  ScenarioLatency latency;
};

// Scenario document:
//   {name, seed?, participants?, utc_offset_minutes?,
//    home: {room_map: path | {...}} | {walkthrough: path | {...}},
//    batches: path (JSON Lines), objects: [...], trials: [...],
//    latency?: {preprocess, image_embedder, text_embedder, vlm, llm},
//    searcher?: {recall_probability, truth_weight, miss_probability,
//                seconds_per_room, cap_seconds}}
// Paths are relative to the scenario file. Throws ScenarioInvalid.
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

// Labels of the scenario's home (map labels, or normalized walkthrough labels).
std::vector<std::string> scenario_rooms(const Scenario& s);

// Every trial object is listed in `objects`, every truth room exists, every
// trial is asked after the last batch, placements precede questions.
// Throws ScenarioInvalid.
void validate_scenario(const Scenario& s);

struct ReplayResult {
  std::string diary_jsonl;
  std::string answers_jsonl;
  std::string trajectory_jsonl;
  nlohmann::json summary;
  std::string report;
  std::vector<TrialAnnotation> annotations;
  std::size_t hands_true_batches = 0;
  std::size_t vlm_provider_calls = 0;
};

// Runs the scenario through a fresh engine with mock providers on a virtual
// clock: calibrate, ingest every batch, ask every assisted trial, classify,
// simulate searches, report latency. Identical scenarios give byte-identical
// results. Writes diary.jsonl, answers.jsonl, trajectory.jsonl,
// summary.json and report.txt when out_dir is non-empty.
ReplayResult replay(const Scenario& scenario, const std::filesystem::path& out_dir = {});

}  // namespace mempal
