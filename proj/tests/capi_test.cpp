#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mempal/mempal.h"

using nlohmann::json;

namespace {

const std::string kDir = std::string(MEMPAL_SOURCE_DIR) + "/data/scenarios/home20";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string take(char* p) {
  std::string s = p ? p : "";
  mempal_free(p);
  return s;
}

struct Handle {
  mempal_engine* e = nullptr;
  explicit Handle(const char* overrides = R"({"virtual_time": true})") {
    EXPECT_EQ(mempal_engine_open(nullptr, overrides, &e), MEMPAL_OK) << mempal_last_error();
  }
  ~Handle() { mempal_engine_close(e); }

  void load_home(std::size_t batches) {
    char* out = nullptr;
    ASSERT_EQ(mempal_calibrate(e, slurp(kDir + "/walkthrough.json").c_str(), &out), MEMPAL_OK) << mempal_last_error();
    take(out);
    std::istringstream lines(slurp(kDir + "/batches.jsonl"));
    std::string line;
    for (std::size_t i = 0; i < batches && std::getline(lines, line); ++i) {
      ASSERT_EQ(mempal_ingest(e, line.c_str(), kDir.c_str(), &out), MEMPAL_OK) << mempal_last_error();
      take(out);
    }
  }

  json query(const std::string& transcript, const std::string& session = "c") {
    char* out = nullptr;
    const json req = {{"session_id", session}, {"transcript", transcript}, {"t", "2024-05-14T18:00:00Z"}};
    EXPECT_EQ(mempal_query(e, req.dump().c_str(), &out), MEMPAL_OK) << mempal_last_error();
    return json::parse(take(out));
  }
};

}  // namespace

TEST(CApi, StatusNames) {
  EXPECT_STREQ(mempal_status_name(MEMPAL_OK), "Ok");
  EXPECT_STREQ(mempal_status_name(MEMPAL_NOT_CALIBRATED), "NotCalibrated");
  EXPECT_STREQ(mempal_status_name(MEMPAL_UNAUTHORIZED), "Unauthorized");
  EXPECT_STREQ(mempal_status_name(MEMPAL_INTERNAL), "Internal");
  EXPECT_EQ(mempal_http_status(MEMPAL_BAD_TIME_RANGE), 416);
  EXPECT_EQ(mempal_http_status(MEMPAL_IMAGE_NOT_RETAINED), 410);
  EXPECT_EQ(mempal_http_status(MEMPAL_OK), 200);
  EXPECT_STRNE(mempal_version(), "");
}

TEST(CApi, ErrorsComeBackAsCodes) {
  Handle h;
  char* out = nullptr;
  EXPECT_EQ(mempal_query(h.e, R"({"transcript": "Pal, where are my keys?"})", &out), MEMPAL_NOT_CALIBRATED);
  EXPECT_EQ(out, nullptr);
  EXPECT_STRNE(mempal_last_error(), "");
  EXPECT_EQ(mempal_query(h.e, "{broken", &out), MEMPAL_INVALID_ARGUMENT);
  EXPECT_EQ(mempal_query(nullptr, "{}", &out), MEMPAL_INVALID_ARGUMENT);
  EXPECT_EQ(mempal_calibrate(h.e, "{}", &out), MEMPAL_NO_LABELS);
  EXPECT_EQ(mempal_engine_open(nullptr, R"({"dim": 0})", &h.e), MEMPAL_INVALID_ARGUMENT);
  mempal_engine_close(nullptr);
}

TEST(CApi, IngestAndQuery) {
  Handle h;
  h.load_home(1000);
  const json a = h.query("Pal, where are my keys?");
  EXPECT_EQ(a["text"], "Your keys was last seen at 10:20am in the hall near side table with key bowl.");
  EXPECT_EQ(h.query("Pal, where's my ring?")["text"], "I'm not sure.");

  char* out = nullptr;
  ASSERT_EQ(mempal_calibration(h.e, &out), MEMPAL_OK);
  EXPECT_EQ(json::parse(take(out))["rooms"].size(), 6u);
  ASSERT_EQ(mempal_activities(h.e, "0", nullptr, "keys", nullptr, &out), MEMPAL_OK);
  EXPECT_FALSE(json::parse(take(out))["records"].empty());
  EXPECT_EQ(mempal_activities(h.e, "2024-05-15T00:00:00Z", "2024-05-14T00:00:00Z", nullptr, nullptr, &out),
            MEMPAL_BAD_TIME_RANGE);
  ASSERT_EQ(mempal_flush(h.e), MEMPAL_OK);
  ASSERT_EQ(mempal_trajectory(h.e, &out), MEMPAL_OK);
  EXPECT_GT(json::parse(take(out))["rows"].size(), 5u);
  EXPECT_EQ(mempal_visual_aid(h.e, "keys", &out), MEMPAL_IMAGE_NOT_RETAINED);
  ASSERT_EQ(mempal_latency_report(h.e, &out), MEMPAL_OK);
  EXPECT_NE(take(out).find("Total Time"), std::string::npos);
  ASSERT_EQ(mempal_rename_room(h.e, "hall", "entrance", &out), MEMPAL_OK);
  take(out);
  EXPECT_EQ(h.query("Pal, where are my keys?")["text"],
            "Your keys was last seen at 10:20am in the entrance near side table with key bowl.");
}

TEST(CApi, ExportImport) {
  Handle h;
  h.load_home(1000);
  char* out = nullptr;
  ASSERT_EQ(mempal_export(h.e, &out), MEMPAL_OK);
  const std::string diary = take(out);

  Handle fresh;
  ASSERT_EQ(mempal_calibrate(fresh.e, slurp(kDir + "/walkthrough.json").c_str(), &out), MEMPAL_OK);
  take(out);
  std::size_t n = 0;
  ASSERT_EQ(mempal_import(fresh.e, diary.c_str(), &n), MEMPAL_OK);
  EXPECT_EQ(n, 60u);
  for (const char* q : {"Pal, where are my keys?", "Pal, where is my cup?", "Pal, where are my glasses?"}) {
    EXPECT_EQ(fresh.query(q)["text"], h.query(q)["text"]) << q;
  }
}

TEST(CApi, ReplayAndEval) {
  char* a = nullptr;
  char* b = nullptr;
  char* report = nullptr;
  const std::string scenario = kDir + "/scenario.json";
  ASSERT_EQ(mempal_replay(scenario.c_str(), nullptr, &a, &report), MEMPAL_OK) << mempal_last_error();
  ASSERT_EQ(mempal_replay(scenario.c_str(), nullptr, &b, nullptr), MEMPAL_OK);
  EXPECT_EQ(take(a), take(b));
  EXPECT_NE(take(report).find("Object retrieval accuracy"), std::string::npos);

  const json req = {{"annotations", {{{"trial_id", "1"}, {"condition", "mempal"}, {"classification", "correct"}},
                                     {{"trial_id", "2"}, {"condition", "visual"}, {"classification", "correct"}}}}};
  char* out = nullptr;
  ASSERT_EQ(mempal_eval(req.dump().c_str(), &out), MEMPAL_OK) << mempal_last_error();
  EXPECT_EQ(json::parse(take(out))["accuracy"][0]["percent"], 100);
  EXPECT_EQ(mempal_replay("/nonexistent/scenario.json", nullptr, &out, nullptr), MEMPAL_SCENARIO_INVALID);
}

TEST(CApi, Server) {
  Handle h;
  mempal_server* server = nullptr;
  int port = 0;
  ASSERT_EQ(mempal_server_start(h.e, "127.0.0.1", 0, &server, &port), MEMPAL_OK) << mempal_last_error();
  EXPECT_GT(port, 0);
  httplib::Client c("127.0.0.1", port);
  auto r = c.Get("/calibration");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_FALSE(json::parse(r->body)["calibrated"].get<bool>());
  mempal_server_stop(server);
}
