#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "eval/classify.hpp"
#include "eval/evaluate.hpp"
#include "eval/latency.hpp"
#include "eval/replay.hpp"
#include "eval/search.hpp"
#include "store/activities_db.hpp"
#include "support.hpp"
#include "accuracy_fixture.hpp"

using namespace mempal;
using namespace mempal::testing;

namespace {

const std::string kScenario = std::string(MEMPAL_SOURCE_DIR) + "/data/scenarios/home20/scenario.json";

struct ClassifyFixture {
  ActivitiesDB db{4};
  Rng rng{3};

  RecordId add(Timestamp t, std::string room, std::vector<std::string> objects) {
    return db.insert(make_record("s", t, std::move(room), "holding things", std::move(objects), "table",
                                 random_unit(rng, 4)));
  }
  static Answer citing(RecordId id, AnswerPath path = AnswerPath::ExactMatch) {
    Answer a;
    a.path = path;
    a.supporting_record = id;
    return a;
  }
  static Trial trial(std::string object, std::string truth, Condition c = Condition::MemPal) {
    Trial t;
    t.id = "x";
    t.object = std::move(object);
    t.truth_location = std::move(truth);
    t.condition = c;
    return t;
  }
};

std::size_t count_of(const std::vector<AccuracyCell>& table, const std::string& column) {
  for (const auto& c : table) {
    if (c.column == column) return c.count;
  }
  ADD_FAILURE() << "no column " << column;
  return 0;
}

int percent_of(const std::vector<AccuracyCell>& table, const std::string& column) {
  for (const auto& c : table) {
    if (c.column == column) return c.percent;
  }
  ADD_FAILURE() << "no column " << column;
  return -1;
}

}  // namespace

TEST(Classify, AbsentObjectIsNoObjectDetected) {
  ClassifyFixture f;
  f.add(at_clock(9, 0), "kitchen", {"cup"});
  Answer a;
  EXPECT_EQ(classify_trial(a, f.db.snapshot(), ClassifyFixture::trial("keys", "hall")), TrialClass::NoObjectDetected);
}

TEST(Classify, WrongRoomIsIncorrectLocation) {
  ClassifyFixture f;
  const auto id = f.add(at_clock(9, 0), "kitchen", {"keys"});
  EXPECT_EQ(classify_trial(ClassifyFixture::citing(id), f.db.snapshot(), ClassifyFixture::trial("keys", "study")),
            TrialClass::IncorrectLocation);
}

TEST(Classify, RightRoomIsCorrect) {
  ClassifyFixture f;
  const auto id = f.add(at_clock(9, 0), "study", {"keys"});
  EXPECT_EQ(classify_trial(ClassifyFixture::citing(id), f.db.snapshot(), ClassifyFixture::trial("keys", "study")),
            TrialClass::Correct);
}

TEST(Classify, CitingAnotherObjectIsMisidentified) {
  ClassifyFixture f;
  f.add(at_clock(8, 0), "hall", {"glasses"});
  const auto wrong = f.add(at_clock(9, 0), "bedroom", {"sunglasses"});
  EXPECT_EQ(classify_trial(ClassifyFixture::citing(wrong, AnswerPath::Rag), f.db.snapshot(),
                           ClassifyFixture::trial("glasses", "bedroom")),
            TrialClass::ObjectMisidentified);
}

TEST(Classify, SightingBeforePlacementIsMisidentified) {
  ClassifyFixture f;
  const auto early = f.add(at_clock(8, 0), "kitchen", {"ring"});
  Trial t = ClassifyFixture::trial("ring", "kitchen");
  t.placed_at = at_clock(9, 0);
  EXPECT_EQ(classify_trial(ClassifyFixture::citing(early), f.db.snapshot(), t), TrialClass::ObjectMisidentified);
}

TEST(Classify, NotSureWithSightingsIsMisidentified) {
  ClassifyFixture f;
  f.add(at_clock(8, 0), "kitchen", {"ring"});
  Answer a;
  a.path = AnswerPath::NotFound;
  EXPECT_EQ(classify_trial(a, f.db.snapshot(), ClassifyFixture::trial("ring", "kitchen")),
            TrialClass::ObjectMisidentified);
}

TEST(Classify, VisualUsesLatestSighting) {
  ClassifyFixture f;
  f.add(at_clock(8, 0), "kitchen", {"cup"});
  f.add(at_clock(9, 0), "study", {"cup"});
  Answer none;
  EXPECT_EQ(classify_trial(none, f.db.snapshot(), ClassifyFixture::trial("cup", "study", Condition::Visual)),
            TrialClass::Correct);
  EXPECT_EQ(classify_trial(none, f.db.snapshot(), ClassifyFixture::trial("cup", "kitchen", Condition::Visual)),
            TrialClass::IncorrectLocation);
}

TEST(Classify, TrialJsonRoundTrip) {
  Trial t = ClassifyFixture::trial("ID card", "Hall");
  t.object = "id card";
  t.truth_location = "hall";
  t.placed_at = at_clock(9, 30);
  const Trial back = trial_from_json(trial_to_json(t));
  EXPECT_EQ(back.object, "id card");
  EXPECT_EQ(back.truth_location, "hall");
  EXPECT_EQ(back.placed_at, t.placed_at);
  EXPECT_EQ(trial_query(back), "Pal, where is my id card?");
  EXPECT_THROW(trial_from_json(nlohmann::json{{"id", "a"}}), Error);
}

TEST(AccuracyTable, PercentExamples) {
  EXPECT_EQ(rounded_percent(66, 92), 72);
  EXPECT_EQ(rounded_percent(28, 53), 53);
  EXPECT_EQ(rounded_percent(0, 7), 0);
  EXPECT_EQ(rounded_percent(1, 2), 50);
  EXPECT_EQ(rounded_percent(1, 8), 13);  // 12.5 rounds up
  try {
    rounded_percent(1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDenominator);
  }
  EXPECT_THROW(rounded_percent(5, 4), Error);
}

TEST(AccuracyTable, ReportedMarginals) {
  const auto table = accuracy_table(reported_annotations(), reported_denominators());
  ASSERT_EQ(table.size(), 5u);
  EXPECT_EQ(count_of(table, "Correct (MemPal)"), 66u);
  EXPECT_EQ(percent_of(table, "Correct (MemPal)"), 72);
  EXPECT_EQ(percent_of(table, "Correct (Visual)"), 53);
  EXPECT_EQ(percent_of(table, "Incorrect location"), 22);
  EXPECT_EQ(percent_of(table, "No object detected"), 12);
  EXPECT_EQ(percent_of(table, "Object misidentified"), 24);
  for (const auto& c : table) {
    EXPECT_LE(c.count, c.total);
    EXPECT_EQ(c.percent, rounded_percent(c.count, c.total));
  }
  const std::string text = render_accuracy_table(table);
  EXPECT_NE(text.find("Total Count"), std::string::npos);
  EXPECT_NE(text.find("72%"), std::string::npos);
}

TEST(AccuracyTable, InconsistentDenominatorsRejected) {
  EXPECT_THROW(accuracy_table(reported_annotations(), Denominators{92, 53, 150}), Error);
  EXPECT_THROW(accuracy_table({}, Denominators{0, 0, 0}), Error);
}

TEST(AccuracyTable, DenominatorsFromAnnotations) {
  std::vector<TrialAnnotation> a = {{"1", Condition::MemPal, TrialClass::Correct},
                                    {"2", Condition::Visual, TrialClass::Correct},
                                    {"3", Condition::Baseline, TrialClass::Correct}};
  const auto d = denominators_from(a);
  EXPECT_EQ(d.mempal, 1u);
  EXPECT_EQ(d.visual, 1u);
  EXPECT_EQ(d.all, 2u);
  EXPECT_EQ(annotation_from_json(annotation_to_json(a[1])).condition, Condition::Visual);
}

TEST(Latency, MeanOfTwoSamples) {
  const std::vector<double> s = {2.0, 2.34};
  const auto st = summarize(s);
  EXPECT_NEAR(st.mean_s, 2.17, 1e-12);
  EXPECT_NEAR(st.sd_s, 0.24041630560342617, 1e-12);
  EXPECT_EQ(st.calls, 2u);
}

TEST(Latency, SingleSampleHasZeroSd) {
  const std::vector<double> s = {1.5};
  EXPECT_EQ(summarize(s).sd_s, 0.0);
}

TEST(Latency, ReportRows) {
  std::vector<StageTrace> traces(3);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    traces[i].batch_id = "b" + std::to_string(i);
    traces[i].timings.location = std::chrono::milliseconds(400 + 10 * static_cast<int>(i));
    traces[i].timings.preprocess = std::chrono::milliseconds(50);
  }
  traces[1].vlm_called = true;
  traces[1].record_inserted = true;
  traces[1].timings.vlm = std::chrono::milliseconds(5000);
  traces[1].timings.total = std::chrono::milliseconds(5460);
  const std::vector<double> q = {2.0, 2.34};
  const auto r = latency_report(traces, q);
  EXPECT_EQ(r.locations.calls, 3u);
  EXPECT_NEAR(r.locations.mean_s, 0.41, 1e-9);
  EXPECT_EQ(r.vlm.calls, 1u);
  EXPECT_NEAR(r.vlm.mean_s, 5.0, 1e-9);
  EXPECT_EQ(r.total.calls, 1u);
  EXPECT_NEAR(r.preprocess_total_s, 0.15, 1e-9);
  ASSERT_TRUE(r.query);
  EXPECT_NEAR(r.query->mean_s, 2.17, 1e-9);
  const std::string text = render_latency_report(r);
  for (const char* row : {"Locations", "VLM", "Total Time", "Mean Process Time", "Stdev Process Time",
                          "Total Process Calls"}) {
    EXPECT_NE(text.find(row), std::string::npos) << row;
  }
}

TEST(Latency, NothingTimedIsNoData) {
  try {
    latency_report({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoData);
  }
}

TEST(PathLength, Examples) {
  EXPECT_EQ(path_length({{"study"}, true, 30}), 1u);
  EXPECT_EQ(path_length({{"kitchen", "hall", "kitchen"}, true, 90}), 3u);
  EXPECT_EQ(path_length({{"kitchen", "kitchen", "hall"}, true, 90}), 2u);
  EXPECT_EQ(path_length({{}, false, 0}), 0u);
}

namespace {

const std::vector<std::string> kRooms = {"kitchen", "hall", "living room", "study", "bedroom", "bathroom"};
const std::vector<SearchTask> kTasks = {{"keys", "hall"}, {"cup", "kitchen"}, {"book", "living room"},
                                        {"ruler", "study"}, {"watch", "bedroom"}, {"ring", "bathroom"}};

}  // namespace

TEST(Search, BudgetFromCap) {
  SearcherModel m;
  EXPECT_EQ(m.room_budget(), 6u);
  m.seconds_per_room = 40;
  EXPECT_EQ(m.room_budget(), 5u);
}

TEST(Search, TracesRespectCap) {
  SearcherModel m;
  m.recall_probability = 0.0;
  m.miss_probability = 0.5;
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto t = simulate_baseline(kRooms, "study", m, rng);
    EXPECT_FALSE(t.rooms_visited.empty());
    EXPECT_LE(t.rooms_visited.size(), m.room_budget());
    EXPECT_LE(t.duration_s, kSearchCapSeconds);
    if (t.found) {
      EXPECT_EQ(t.rooms_visited.back(), "study");
      EXPECT_GE(path_length(t), 1u);
    }
  }
}

TEST(Search, AllCorrectAnswersGiveUnitPath) {
  const auto s = run_search_experiment(kRooms, kTasks, 15, ErrorProfile::all_correct(), SearcherModel{}, 5);
  EXPECT_EQ(s.assisted.mean_path_length, 1.0);
  EXPECT_EQ(s.assisted.accuracy, 1.0);
  EXPECT_EQ(s.assisted.trials, 90u);
}

TEST(Search, PerfectMemoryBaselineAlwaysFinds) {
  SearcherModel m;
  m.recall_probability = 1.0;
  const auto s = run_search_experiment(kRooms, kTasks, 15, ErrorProfile::reported(), m, 5);
  EXPECT_EQ(s.baseline.accuracy, 1.0);
  EXPECT_EQ(s.baseline.mean_path_length, 1.0);
}

TEST(Search, ReportedProfileShortensPaths) {
  const auto p = ErrorProfile::reported();
  EXPECT_NEAR(p.correct + p.incorrect_location + p.object_misidentified + p.no_object_detected, 1.0, 1e-12);
  EXPECT_NEAR(p.correct, 0.72, 1e-12);
  const auto mc = run_monte_carlo(kRooms, kTasks, 15, p, SearcherModel{}, 20, 100);
  EXPECT_LT(mc.assisted_mean_path, mc.baseline_mean_path);
  EXPECT_GE(mc.assisted_shorter, 18u);
}

TEST(Search, SameSeedSameResult) {
  const auto a = run_search_experiment(kRooms, kTasks, 15, ErrorProfile::reported(), SearcherModel{}, 42);
  const auto b = run_search_experiment(kRooms, kTasks, 15, ErrorProfile::reported(), SearcherModel{}, 42);
  EXPECT_EQ(to_json_value(a), to_json_value(b));
}

TEST(Search, WrongRoomAnswerStartsThere) {
  Rng rng(2);
  SearcherModel m;
  const auto t = simulate_assisted(kRooms, "study", {TrialClass::IncorrectLocation, "kitchen"}, m, rng);
  ASSERT_FALSE(t.rooms_visited.empty());
  EXPECT_EQ(t.rooms_visited.front(), "kitchen");
  EXPECT_GE(path_length(t), 2u);
}

TEST(Search, InvalidInputs) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([] { run_search_experiment(kRooms, {{"keys", "garage"}}, 1, ErrorProfile{}, SearcherModel{}, 1); }),
            ErrorCode::ScenarioInvalid);
  EXPECT_EQ(code([] { run_search_experiment({}, kTasks, 1, ErrorProfile{}, SearcherModel{}, 1); }),
            ErrorCode::ScenarioInvalid);
  EXPECT_EQ(code([] { run_search_experiment(kRooms, {}, 1, ErrorProfile{}, SearcherModel{}, 1); }),
            ErrorCode::ScenarioInvalid);
}

TEST(Replay, BundledScenarioIsDeterministic) {
  const Scenario s = load_scenario(kScenario);
  EXPECT_EQ(s.objects.size(), 20u);
  const auto a = replay(s);
  const auto b = replay(s);
  EXPECT_EQ(a.diary_jsonl, b.diary_jsonl);
  EXPECT_EQ(a.answers_jsonl, b.answers_jsonl);
  EXPECT_EQ(a.trajectory_jsonl, b.trajectory_jsonl);
  EXPECT_EQ(a.summary.dump(), b.summary.dump());
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.vlm_provider_calls, a.hands_true_batches);
  EXPECT_FALSE(a.diary_jsonl.empty());
}

TEST(Replay, WritesOutputs) {
  TempDir dir;
  const auto r = replay(load_scenario(kScenario), dir.path());
  for (const char* f : {"diary.jsonl", "answers.jsonl", "trajectory.jsonl", "summary.json", "report.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / f)) << f;
  }
  EXPECT_EQ(r.summary["trials"].get<std::size_t>(), 60u);
}

namespace {

nlohmann::json tiny_scenario() {
  return nlohmann::json::parse(R"({
    "name": "tiny",
    "home": {"room_map": {"version": 1, "calibration_id": "c", "created_at": "2024-05-14T08:00:00Z",
                          "rooms": [{"label": "kitchen", "centroids": [[1, 0, 0, 0]]},
                                    {"label": "hall", "centroids": [[0, 1, 0, 0]]}],
                          "adjacency": {"kitchen": ["hall"]}}},
    "batches": [
      {"batch_id": "b1", "t": "2024-05-14T09:00:00Z", "hands": true, "embedding": [0.9, 0.1, 0, 0],
       "vlm": {"activity": "putting keys down", "objects": ["keys"], "background": "counter"}}],
    "objects": ["keys"],
    "trials": [{"id": "m1", "object": "keys", "truth_location": "kitchen", "condition": "mempal"}]
  })");
}

ErrorCode scenario_error(const nlohmann::json& j) {
  try {
    validate_scenario(scenario_from_json(j, "."));
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Replay, TinyInlineScenario) {
  const Scenario s = scenario_from_json(tiny_scenario(), ".");
  const auto r = replay(s);
  EXPECT_EQ(r.hands_true_batches, 1u);
  EXPECT_EQ(r.vlm_provider_calls, 1u);
  ASSERT_EQ(r.annotations.size(), 1u);
  EXPECT_EQ(r.annotations[0].classification, TrialClass::Correct);
  EXPECT_NE(r.answers_jsonl.find("Your keys was last seen at 9:00am in the kitchen near counter."), std::string::npos);
}

TEST(Replay, ScenarioValidation) {
  auto j = tiny_scenario();
  j["objects"] = nlohmann::json::array({"cup"});
  EXPECT_EQ(scenario_error(j), ErrorCode::ScenarioInvalid);

  j = tiny_scenario();
  j["trials"][0]["truth_location"] = "garage";
  EXPECT_EQ(scenario_error(j), ErrorCode::ScenarioInvalid);

  j = tiny_scenario();
  j["trials"][0]["asked_at"] = "2024-05-14T08:30:00Z";
  EXPECT_EQ(scenario_error(j), ErrorCode::ScenarioInvalid);

  j = tiny_scenario();
  j.erase("home");
  EXPECT_EQ(scenario_error(j), ErrorCode::ScenarioInvalid);
}

TEST(Evaluate, AnnotationRequest) {
  nlohmann::json req = {{"annotations", nlohmann::json::array()},
                        {"denominators", {{"mempal", 92}, {"visual", 53}, {"all", 145}}}};
  for (const auto& a : reported_annotations()) req["annotations"].push_back(annotation_to_json(a));
  const auto out = evaluate(req);
  ASSERT_EQ(out["accuracy"].size(), 5u);
  EXPECT_EQ(out["accuracy"][0]["percent"].get<int>(), 72);
}

TEST(Evaluate, ScenarioRequestAllCorrect) {
  const auto out = evaluate({{"scenario", kScenario}, {"profile", "all_correct"}, {"experiments", 3}});
  EXPECT_EQ(out["monte_carlo"]["assisted_mean_path"].get<double>(), 1.0);
  EXPECT_EQ(out["monte_carlo"]["experiments"].get<int>(), 3);
  EXPECT_THROW(evaluate({{"scenario", kScenario}, {"profile", "bogus"}}), Error);
}
