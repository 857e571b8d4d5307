#include "mempal/mempal.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "engine/config.hpp"
#include "engine/engine.hpp"
#include "eval/evaluate.hpp"
#include "eval/replay.hpp"
#include "service/api.hpp"
#include "service/http_service.hpp"

struct mempal_engine {
  std::unique_ptr<mempal::Engine> engine;
};

struct mempal_server {
  std::unique_ptr<mempal::Service> service;
};

namespace {

thread_local std::string last_error;

mempal_status to_status(mempal::ErrorCode code) { return static_cast<mempal_status>(static_cast<int>(code)); }

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs f, turning exceptions into status codes.
template <typename F>
mempal_status guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return MEMPAL_OK;
  } catch (const mempal::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return MEMPAL_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MEMPAL_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return MEMPAL_INTERNAL;
  }
}

nlohmann::json parse(const char* text) {
  if (!text) mempal::fail(mempal::ErrorCode::InvalidArgument, "missing JSON argument");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    mempal::fail(mempal::ErrorCode::InvalidArgument, std::string("argument is not JSON: ") + e.what());
  }
}

mempal::Engine& need(mempal_engine* e) {
  if (!e || !e->engine) mempal::fail(mempal::ErrorCode::InvalidArgument, "null engine");
  return *e->engine;
}

void put(char** out, const std::string& s) {
  if (!out) mempal::fail(mempal::ErrorCode::InvalidArgument, "null output pointer");
  *out = dup(s);
}

}  // namespace

extern "C" {

const char* mempal_version(void) { return "0.1.0"; }

const char* mempal_status_name(mempal_status status) {
  if (status == MEMPAL_OK) return "Ok";
  if (status == MEMPAL_INTERNAL) return "Internal";
  if (status < MEMPAL_INVALID_ARGUMENT || status > MEMPAL_UNAUTHORIZED) return "Unknown";
  return mempal::to_string(static_cast<mempal::ErrorCode>(status)).data();
}

int mempal_http_status(mempal_status status) {
  if (status == MEMPAL_OK) return 200;
  if (status < MEMPAL_INVALID_ARGUMENT || status > MEMPAL_UNAUTHORIZED) return 500;
  return mempal::http_status(static_cast<mempal::ErrorCode>(status));
}

const char* mempal_last_error(void) { return last_error.c_str(); }

void mempal_free(char* s) { std::free(s); }

mempal_status mempal_engine_open(const char* config_path, const char* overrides_json, mempal_engine** out) {
  return guarded([&] {
    if (!out) mempal::fail(mempal::ErrorCode::InvalidArgument, "null output pointer");
    mempal::EngineConfig cfg = config_path && *config_path ? mempal::load_engine_config(config_path) : mempal::EngineConfig{};
    mempal::apply_env_overrides(cfg, mempal::process_env());
    if (overrides_json && *overrides_json) {
      nlohmann::json j = mempal::engine_config_to_json(cfg);
      j.merge_patch(parse(overrides_json));
      cfg = mempal::engine_config_from_json(j);
    }
    auto handle = std::make_unique<mempal_engine>();
    handle->engine = std::make_unique<mempal::Engine>(std::move(cfg));
    *out = handle.release();
  });
}

void mempal_engine_close(mempal_engine* engine) { delete engine; }

mempal_status mempal_engine_config(mempal_engine* engine, char** out_json) {
  return guarded([&] { put(out_json, mempal::engine_config_to_json(need(engine).config()).dump()); });
}

mempal_status mempal_calibrate(mempal_engine* engine, const char* request_json, char** out_json) {
  return guarded([&] {
    auto& e = need(engine);
    const nlohmann::json body = request_json && *request_json ? parse(request_json) : nlohmann::json::object();
    put(out_json, mempal::api::calibrate(e, body).dump());
  });
}

mempal_status mempal_calibration(mempal_engine* engine, char** out_json) {
  return guarded([&] { put(out_json, mempal::api::calibration(need(engine)).dump()); });
}

mempal_status mempal_rename_room(mempal_engine* engine, const char* old_label, const char* new_label, char** out_json) {
  return guarded([&] {
    auto& e = need(engine);
    if (!old_label || !new_label) mempal::fail(mempal::ErrorCode::InvalidArgument, "rename needs both labels");
    put(out_json, mempal::api::rename_room(e, old_label, {{"new", new_label}}).dump());
  });
}

mempal_status mempal_ingest(mempal_engine* engine, const char* batch_json, const char* frames_dir, char** out_json) {
  return guarded([&] {
    auto& e = need(engine);
    put(out_json, mempal::api::ingest(e, parse(batch_json), frames_dir ? frames_dir : "").dump());
  });
}

mempal_status mempal_query(mempal_engine* engine, const char* request_json, char** out_json) {
  return guarded([&] {
    auto& e = need(engine);
    put(out_json, mempal::api::query(e, parse(request_json)).dump());
  });
}

mempal_status mempal_session(mempal_engine* engine, const char* session_id, char** out_json) {
  return guarded([&] {
    auto& e = need(engine);
    put(out_json, mempal::api::session(e, session_id ? session_id : "default").dump());
  });
}

mempal_status mempal_activities(mempal_engine* engine, const char* since, const char* until, const char* object,
                                const char* room, char** out_json) {
  return guarded([&] {
    auto& e = need(engine);
    mempal::api::ActivityFilter f;
    if (since && *since) f.since = mempal::api::parse_time_param(since);
    if (until && *until) f.until = mempal::api::parse_time_param(until);
    if (object) f.object = object;
    if (room) f.room = room;
    put(out_json, mempal::api::activities(e, f).dump());
  });
}

mempal_status mempal_trajectory(mempal_engine* engine, char** out_json) {
  return guarded([&] { put(out_json, mempal::api::trajectory(need(engine)).dump()); });
}

mempal_status mempal_export(mempal_engine* engine, char** out_jsonl) {
  return guarded([&] { put(out_jsonl, need(engine).export_jsonl()); });
}

mempal_status mempal_import(mempal_engine* engine, const char* jsonl, size_t* out_count) {
  return guarded([&] {
    auto& e = need(engine);
    if (!jsonl) mempal::fail(mempal::ErrorCode::InvalidArgument, "missing diary text");
    std::istringstream in(jsonl);
    const std::size_t n = e.import_jsonl(in);
    if (out_count) *out_count = n;
  });
}

mempal_status mempal_visual_aid(mempal_engine* engine, const char* object, char** out_json) {
  return guarded([&] {
    auto& e = need(engine);
    put(out_json, mempal::api::visual_aid(e, object ? object : "").dump());
  });
}

mempal_status mempal_latency_report(mempal_engine* engine, char** out_json) {
  return guarded([&] {
    auto& e = need(engine);
    const auto report = e.latency();
    nlohmann::json j = mempal::latency_report_to_json(report);
    j["report"] = mempal::render_latency_report(report);
    put(out_json, j.dump());
  });
}

mempal_status mempal_flush(mempal_engine* engine) {
  return guarded([&] { need(engine).flush(); });
}

mempal_status mempal_server_start(mempal_engine* engine, const char* host, int port, mempal_server** out,
                                  int* out_port) {
  return guarded([&] {
    auto& e = need(engine);
    if (!out) mempal::fail(mempal::ErrorCode::InvalidArgument, "null output pointer");
    mempal::ServiceConfig cfg;
    if (host && *host) cfg.host = host;
    cfg.port = port;
    auto handle = std::make_unique<mempal_server>();
    handle->service = std::make_unique<mempal::Service>(e, cfg);
    handle->service->start();
    if (out_port) *out_port = handle->service->port();
    *out = handle.release();
  });
}

void mempal_server_stop(mempal_server* server) { delete server; }

mempal_status mempal_serve(mempal_engine* engine, const char* host, int port) {
  return guarded([&] {
    auto& e = need(engine);
    mempal::ServiceConfig cfg;
    if (host && *host) cfg.host = host;
    cfg.port = port;
    mempal::Service service(e, cfg);
    service.listen();
  });
}

mempal_status mempal_replay(const char* scenario_path, const char* out_dir, char** out_summary_json,
                            char** out_report) {
  return guarded([&] {
    if (!scenario_path) mempal::fail(mempal::ErrorCode::InvalidArgument, "missing scenario path");
    const auto scenario = mempal::load_scenario(scenario_path);
    const auto r = mempal::replay(scenario, out_dir ? std::filesystem::path(out_dir) : std::filesystem::path());
    put(out_summary_json, r.summary.dump());
    if (out_report) *out_report = dup(r.report);
  });
}

mempal_status mempal_eval(const char* request_json, char** out_json) {
  return guarded([&] { put(out_json, mempal::evaluate(parse(request_json)).dump()); });
}

}  // extern "C"
