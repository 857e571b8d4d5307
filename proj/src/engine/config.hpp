#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ingest/pipeline.hpp"
#include "providers/providers.hpp"
#include "query/engine.hpp"
#include "spatial/localizer.hpp"

namespace mempal {

struct TrajectorySinkConfig {
  enum class Kind { None, Memory, File, Http };
  Kind kind = Kind::Memory;
  // File path (default <data_dir>/trajectory.jsonl) or HTTP endpoint.
  std::string target;
  bool async = false;
};

struct EngineConfig {
  // Empty: nothing is persisted.
  std::filesystem::path data_dir;
  std::size_t dim = 64;
  ProviderConfig text_embedder;
  ProviderConfig image_embedder;
  ProviderConfig vlm;
  ProviderConfig llm;
  ProviderConfig transcriber;
  IngestConfig ingest;  // localizer settings live here
  QueryConfig query;
  std::size_t session_turns = 20;
  TrajectorySinkConfig trajectory;
  // Text-only privacy mode unless enabled; images live in a bounded
  // in-memory ring and are never written to disk.
  bool retain_images = false;
  std::size_t image_capacity = 64;
  // When set, a query without the wakeword is answered "I'm not sure.".
  bool require_wakeword = false;
  std::optional<std::string> auth_token;
  // Mock latencies are spent on a manual clock instead of real sleeps.
  bool virtual_time = false;
  std::uint64_t seed = 0x6d656d70616cULL;
};

// Every key is optional:
// {data_dir, dim, providers: {text_embedder, image_embedder, vlm, llm,
//  transcriber}, localizer: {hysteresis_margin, unknown_threshold},
//  ingest: {vlm_prompt_file, preprocess_latency: {mean_s, sd_s}},
//  query: {top_k, rag_min_score, utc_offset_minutes, history_turns,
//  recall_window}, session_turns, trajectory: {kind, target, async},
//  retain_images, image_capacity, require_wakeword, auth_token,
//  virtual_time, seed}
EngineConfig engine_config_from_json(const nlohmann::json& j);
nlohmann::json engine_config_to_json(const EngineConfig& c);
EngineConfig load_engine_config(const std::filesystem::path& path);

// MEMPAL_DATA_DIR, MEMPAL_TOP_K, MEMPAL_HYSTERESIS, MEMPAL_RETAIN_IMAGES,
// MEMPAL_AUTH_TOKEN, MEMPAL_UTC_OFFSET_MINUTES, MEMPAL_VIRTUAL_TIME,
// MEMPAL_<PROVIDER>_ENDPOINT (switches that provider to remote-http).
// `env` maps names to values; pass the process environment in production.
void apply_env_overrides(EngineConfig& c, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> process_env();

}  // namespace mempal
