#include "engine/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

extern char** environ;

namespace mempal {

namespace {

const char* sink_kind_name(TrajectorySinkConfig::Kind k) {
  switch (k) {
    case TrajectorySinkConfig::Kind::None: return "none";
    case TrajectorySinkConfig::Kind::Memory: return "memory";
    case TrajectorySinkConfig::Kind::File: return "file";
    case TrajectorySinkConfig::Kind::Http: return "http";
  }
  return "memory";
}

TrajectorySinkConfig::Kind sink_kind(const std::string& s) {
  if (s == "none") return TrajectorySinkConfig::Kind::None;
  if (s == "memory") return TrajectorySinkConfig::Kind::Memory;
  if (s == "file") return TrajectorySinkConfig::Kind::File;
  if (s == "http") return TrajectorySinkConfig::Kind::Http;
  fail(ErrorCode::InvalidArgument, "unknown trajectory sink '" + s + "'");
}

bool parse_bool(const std::string& name, const std::string& v) {
  const std::string n = to_lower(trim(v));
  if (n == "1" || n == "true" || n == "yes" || n == "on") return true;
  if (n == "0" || n == "false" || n == "no" || n == "off" || n.empty()) return false;
  fail(ErrorCode::InvalidArgument, name + " must be a boolean, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& name, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (!in || !in.eof()) fail(ErrorCode::InvalidArgument, name + " must be numeric, got '" + v + "'");
  return out;
}

}  // namespace

EngineConfig engine_config_from_json(const nlohmann::json& j) {
  EngineConfig c;
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "engine config must be a JSON object");
  try {
    if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
    c.dim = j.value("dim", c.dim);
    if (c.dim == 0) fail(ErrorCode::InvalidArgument, "dim must be positive");
    if (j.contains("providers")) {
      const auto& p = j["providers"];
      if (p.contains("text_embedder")) c.text_embedder = provider_config_from_json(p["text_embedder"]);
      if (p.contains("image_embedder")) c.image_embedder = provider_config_from_json(p["image_embedder"]);
      if (p.contains("vlm")) c.vlm = provider_config_from_json(p["vlm"]);
      if (p.contains("llm")) c.llm = provider_config_from_json(p["llm"]);
      if (p.contains("transcriber")) c.transcriber = provider_config_from_json(p["transcriber"]);
    }
    if (j.contains("localizer")) {
      const auto& l = j["localizer"];
      c.ingest.localizer.hysteresis_margin = l.value("hysteresis_margin", c.ingest.localizer.hysteresis_margin);
      c.ingest.localizer.unknown_threshold = l.value("unknown_threshold", c.ingest.localizer.unknown_threshold);
    }
    if (j.contains("ingest")) {
      const auto& in = j["ingest"];
      if (in.contains("vlm_prompt_file")) {
        const auto path = in["vlm_prompt_file"].get<std::string>();
        std::ifstream f(path);
        if (!f) fail(ErrorCode::Io, "cannot read prompt file '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        c.ingest.vlm_prompt = ss.str();
      }
      if (in.contains("preprocess_latency")) {
        c.ingest.preprocess_latency.mean_s = in["preprocess_latency"].value("mean_s", 0.0);
        c.ingest.preprocess_latency.sd_s = in["preprocess_latency"].value("sd_s", 0.0);
      }
    }
    if (j.contains("query")) {
      const auto& q = j["query"];
      c.query.top_k = q.value("top_k", c.query.top_k);
      c.query.rag_min_score = q.value("rag_min_score", c.query.rag_min_score);
      c.query.utc_offset_minutes = q.value("utc_offset_minutes", c.query.utc_offset_minutes);
      c.query.history_turns = q.value("history_turns", c.query.history_turns);
      c.query.recall_window = q.value("recall_window", c.query.recall_window);
    }
    c.session_turns = j.value("session_turns", c.session_turns);
    if (j.contains("trajectory")) {
      const auto& t = j["trajectory"];
      c.trajectory.kind = sink_kind(t.value("kind", std::string("memory")));
      c.trajectory.target = t.value("target", std::string());
      c.trajectory.async = t.value("async", false);
    }
    c.retain_images = j.value("retain_images", c.retain_images);
    c.image_capacity = j.value("image_capacity", c.image_capacity);
    c.require_wakeword = j.value("require_wakeword", c.require_wakeword);
    if (j.contains("auth_token") && !j["auth_token"].is_null()) c.auth_token = j["auth_token"].get<std::string>();
    c.virtual_time = j.value("virtual_time", c.virtual_time);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed engine config: ") + e.what());
  }
  return c;
}

nlohmann::json engine_config_to_json(const EngineConfig& c) {
  nlohmann::json j;
  j["data_dir"] = c.data_dir.string();
  j["dim"] = c.dim;
  j["providers"] = {{"text_embedder", to_json_value(c.text_embedder)},
                    {"image_embedder", to_json_value(c.image_embedder)},
                    {"vlm", to_json_value(c.vlm)},
                    {"llm", to_json_value(c.llm)},
                    {"transcriber", to_json_value(c.transcriber)}};
  j["localizer"] = {{"hysteresis_margin", c.ingest.localizer.hysteresis_margin},
                    {"unknown_threshold", c.ingest.localizer.unknown_threshold}};
  j["ingest"] = {{"preprocess_latency",
                  {{"mean_s", c.ingest.preprocess_latency.mean_s}, {"sd_s", c.ingest.preprocess_latency.sd_s}}}};
  j["query"] = {{"top_k", c.query.top_k},
                {"rag_min_score", c.query.rag_min_score},
                {"utc_offset_minutes", c.query.utc_offset_minutes},
                {"history_turns", c.query.history_turns},
                {"recall_window", c.query.recall_window}};
  j["session_turns"] = c.session_turns;
  j["trajectory"] = {{"kind", sink_kind_name(c.trajectory.kind)}, {"target", c.trajectory.target},
                     {"async", c.trajectory.async}};
  j["retain_images"] = c.retain_images;
  j["image_capacity"] = c.image_capacity;
  j["require_wakeword"] = c.require_wakeword;
  j["auth_token"] = c.auth_token ? nlohmann::json(*c.auth_token) : nlohmann::json(nullptr);
  j["virtual_time"] = c.virtual_time;
  j["seed"] = c.seed;
  return j;
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path.string() + "'");
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::InvalidArgument, "config '" + path.string() + "' is not valid JSON");
  return engine_config_from_json(j);
}

void apply_env_overrides(EngineConfig& c, const std::map<std::string, std::string>& env) {
  auto get = [&](const char* name) -> const std::string* {
    auto it = env.find(name);
    return it == env.end() ? nullptr : &it->second;
  };
  if (auto v = get("MEMPAL_DATA_DIR")) c.data_dir = *v;
  if (auto v = get("MEMPAL_TOP_K")) c.query.top_k = parse_number<std::size_t>("MEMPAL_TOP_K", *v);
  if (auto v = get("MEMPAL_HYSTERESIS")) c.ingest.localizer.hysteresis_margin = parse_number<double>("MEMPAL_HYSTERESIS", *v);
  if (auto v = get("MEMPAL_RETAIN_IMAGES")) c.retain_images = parse_bool("MEMPAL_RETAIN_IMAGES", *v);
  if (auto v = get("MEMPAL_AUTH_TOKEN")) c.auth_token = *v;
  if (auto v = get("MEMPAL_UTC_OFFSET_MINUTES")) {
    c.query.utc_offset_minutes = parse_number<int>("MEMPAL_UTC_OFFSET_MINUTES", *v);
  }
  if (auto v = get("MEMPAL_VIRTUAL_TIME")) c.virtual_time = parse_bool("MEMPAL_VIRTUAL_TIME", *v);
  const std::pair<const char*, ProviderConfig*> endpoints[] = {
      {"MEMPAL_TEXT_EMBEDDER_ENDPOINT", &c.text_embedder}, {"MEMPAL_IMAGE_EMBEDDER_ENDPOINT", &c.image_embedder},
      {"MEMPAL_VLM_ENDPOINT", &c.vlm},                     {"MEMPAL_LLM_ENDPOINT", &c.llm},
      {"MEMPAL_TRANSCRIBER_ENDPOINT", &c.transcriber},
  };
  for (const auto& [name, provider] : endpoints) {
    if (auto v = get(name)) {
      provider->kind = ProviderConfig::Kind::RemoteHttp;
      provider->endpoint = *v;
    }
  }
}

std::map<std::string, std::string> process_env() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    if (!starts_with_ci(kv, "MEMPAL_")) continue;
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  return out;
}

}  // namespace mempal
