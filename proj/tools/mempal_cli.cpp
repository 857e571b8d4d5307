// mempal command line. Talks to the engine only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mempal/mempal.h"

using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string data_dir;
  bool json_out = false;
};

// Owned C string from the library.
struct CStr {
  char* p = nullptr;
  ~CStr() { mempal_free(p); }
  std::string str() const { return p ? p : ""; }
};

[[noreturn]] void die(mempal_status st) {
  std::fprintf(stderr, "mempal: %s: %s\n", mempal_status_name(st), mempal_last_error());
  std::exit(st == MEMPAL_INTERNAL ? 100 : static_cast<int>(st) + 1);
}

void check(mempal_status st) {
  if (st != MEMPAL_OK) die(st);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "mempal: cannot read %s\n", path.c_str());
    std::exit(2);
  }
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string dirname_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? "." : path.substr(0, slash);
}

class Session {
 public:
  explicit Session(const Common& c) {
    json overrides = json::object();
    if (!c.data_dir.empty()) overrides["data_dir"] = c.data_dir;
    const char* cfg = c.config.empty() ? nullptr : c.config.c_str();
    check(mempal_engine_open(cfg, overrides.empty() ? nullptr : overrides.dump().c_str(), &engine_));
    CStr effective;
    check(mempal_engine_config(engine_, &effective.p));
    if (json::parse(effective.str()).value("data_dir", std::string()).empty()) {
      // Keep state between invocations by default.
      mempal_engine_close(engine_);
      engine_ = nullptr;
      overrides["data_dir"] = "mempal-data";
      check(mempal_engine_open(cfg, overrides.dump().c_str(), &engine_));
    }
  }
  ~Session() { mempal_engine_close(engine_); }
  mempal_engine* get() const { return engine_; }

 private:
  mempal_engine* engine_ = nullptr;
};

void print_json(const std::string& text) { std::cout << json::parse(text).dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mempal: object-location memory from egocentric video"};
  app.require_subcommand(1);
  Common common;
  app.add_option("-c,--config", common.config, "Engine config file (JSON)");
  app.add_option("-d,--data-dir", common.data_dir, "Data directory (default: config, MEMPAL_DATA_DIR, ./mempal-data)");
  app.add_flag("--json", common.json_out, "Print raw JSON");

  auto* cal = app.add_subcommand("calibrate", "Build the room map from a labelled walkthrough (or install a saved map)");
  std::string cal_file;
  bool cal_is_map = false;
  cal->add_option("file", cal_file, "Walkthrough {frames, labels} or room map JSON")->required();
  cal->add_flag("--map", cal_is_map, "The file is a saved room map");

  auto* ing = app.add_subcommand("ingest", "Ingest frame batches (JSON Lines) or import a diary export");
  std::string ing_file, frames_dir;
  bool ing_diary = false;
  ing->add_option("file", ing_file, "Batches, one JSON object per line")->required();
  ing->add_option("--frames-dir", frames_dir, "Base for relative frame paths (default: the file's directory)");
  ing->add_flag("--diary", ing_diary, "The file is a diary export to import");

  auto* qry = app.add_subcommand("query", "Ask where something is");
  std::string transcript, session_id = "cli", at;
  qry->add_option("transcript", transcript, "e.g. \"Pal, where are my keys?\"")->required();
  qry->add_option("-s,--session", session_id, "Chat session id");
  qry->add_option("--at", at, "Question time (RFC 3339); default now");

  auto* exp = app.add_subcommand("export", "Write the diary as JSON Lines to stdout");

  auto* rep = app.add_subcommand("replay", "Replay a scenario with mock providers");
  std::string rep_scenario, rep_out;
  rep->add_option("scenario", rep_scenario, "Scenario JSON")->required();
  rep->add_option("-o,--out", rep_out, "Directory for diary, answers, trajectory, summary, report");

  auto* ev = app.add_subcommand("eval", "Accuracy table and simulated search");
  std::string ev_scenario, ev_annotations, ev_profile = "reported";
  std::size_t experiments = 100;
  std::uint64_t ev_seed = 0;
  auto* ev_src = ev->add_option("scenario", ev_scenario, "Scenario JSON");
  ev->add_option("--annotations", ev_annotations, "Annotation fixture {annotations, denominators?}")
      ->excludes(ev_src);
  ev->add_option("--profile", ev_profile, "Answer error profile: reported, all_correct, replay")
      ->check(CLI::IsMember({"reported", "all_correct", "replay"}));
  ev->add_option("--experiments", experiments, "Monte Carlo experiments");
  auto* seed_opt = ev->add_option("--seed", ev_seed, "Seed (default: the scenario's)");

  auto* srv = app.add_subcommand("serve", "Serve the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  srv->add_option("--host", host, "Bind address");
  srv->add_option("-p,--port", port, "Port");

  CLI11_PARSE(app, argc, argv);

  if (*rep) {
    CStr summary, report;
    check(mempal_replay(rep_scenario.c_str(), rep_out.empty() ? nullptr : rep_out.c_str(), &summary.p, &report.p));
    if (common.json_out) {
      print_json(summary.str());
    } else {
      std::cout << report.str();
    }
    return 0;
  }

  if (*ev) {
    json request;
    if (!ev_annotations.empty()) {
      request = json::parse(read_file(ev_annotations));
    } else if (!ev_scenario.empty()) {
      request = {{"scenario", ev_scenario}, {"profile", ev_profile}, {"experiments", experiments}};
      if (*seed_opt) request["seed"] = ev_seed;
    } else {
      std::fprintf(stderr, "mempal eval: give a scenario or --annotations\n");
      return 2;
    }
    CStr out;
    check(mempal_eval(request.dump().c_str(), &out.p));
    if (common.json_out) {
      print_json(out.str());
    } else {
      std::cout << json::parse(out.str())["report"].get<std::string>();
    }
    return 0;
  }

  Session s(common);

  if (*cal) {
    std::string body = read_file(cal_file);
    if (cal_is_map) body = json{{"room_map", json::parse(body)}}.dump();
    CStr out;
    check(mempal_calibrate(s.get(), body.c_str(), &out.p));
    if (common.json_out) {
      print_json(out.str());
    } else {
      const json j = json::parse(out.str());
      std::cout << "calibration " << j["calibration_id"].get<std::string>() << "\n";
      for (const auto& r : j["rooms"]) std::cout << "  " << r.get<std::string>() << "\n";
    }
  } else if (*ing) {
    if (ing_diary) {
      std::size_t n = 0;
      check(mempal_import(s.get(), read_file(ing_file).c_str(), &n));
      std::cout << "imported " << n << " records\n";
      return 0;
    }
    const std::string base = frames_dir.empty() ? dirname_of(ing_file) : frames_dir;
    std::istringstream lines(read_file(ing_file));
    std::string line;
    std::size_t batches = 0, records = 0;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      CStr out;
      check(mempal_ingest(s.get(), line.c_str(), base.c_str(), &out.p));
      const json j = json::parse(out.str());
      ++batches;
      records += j["record_created"].get<bool>();
      if (common.json_out) std::cout << out.str() << "\n";
    }
    check(mempal_flush(s.get()));
    if (!common.json_out) std::cout << batches << " batches, " << records << " records\n";
  } else if (*qry) {
    json request = {{"session_id", session_id}, {"transcript", transcript}};
    if (!at.empty()) request["t"] = at;
    CStr out;
    check(mempal_query(s.get(), request.dump().c_str(), &out.p));
    if (common.json_out) {
      print_json(out.str());
    } else {
      std::cout << json::parse(out.str())["text"].get<std::string>() << "\n";
    }
  } else if (*exp) {
    CStr out;
    check(mempal_export(s.get(), &out.p));
    std::cout << out.str();
  } else if (*srv) {
    check(mempal_serve(s.get(), host.c_str(), port));
  }
  return 0;
}
