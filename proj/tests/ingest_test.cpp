#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/log.hpp"
#include "ingest/frame_batch.hpp"
#include "ingest/hand_detector.hpp"
#include "ingest/pipeline.hpp"
#include "ingest/tiling.hpp"
#include "providers/mock.hpp"
#include "support.hpp"

using namespace mempal;
using namespace mempal::testing;

namespace {

ImageRef solid_frame(std::string id, std::uint8_t v, int w = 2, int h = 2) {
  ImageRef f;
  f.id = std::move(id);
  f.tag = "b";
  f.pixels = std::make_shared<const Image>(Image::solid(w, h, v, v, v));
  return f;
}

RoomMap study_map() {
  std::vector<Room> rooms = {{"study", {basis(64, 0)}}, {"kitchen", {basis(64, 1)}}};
  return RoomMap(rooms, {{"study", {"kitchen"}}, {"kitchen", {"study"}}}, "cal-x", from_unix_ms(0));
}

FrameBatch batch(std::string id, int second, bool hands, std::size_t axis = 0, std::string session = "s1") {
  FrameBatch b;
  b.batch_id = std::move(id);
  b.session_id = std::move(session);
  b.captured_at = at_clock(15, 5, second);
  ImageRef f;
  f.id = b.batch_id + "#0";
  f.tag = b.batch_id;
  f.embedding = basis(64, axis);
  b.frames.push_back(f);
  b.hands = hands;
  return b;
}

struct Rig {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  std::shared_ptr<MockVisionLanguageModel> vlm = std::make_shared<MockVisionLanguageModel>();
  std::shared_ptr<MockHandDetector> hands = std::make_shared<MockHandDetector>();
  std::shared_ptr<MockTextEmbedder> text = std::make_shared<MockTextEmbedder>();
  ActivitiesDB db{64};
  IngestPipeline pipeline;

  Rig(IngestConfig cfg = {})
      : pipeline(IngestProviders{std::make_shared<MockImageEmbedder>(), text, vlm, hands}, db, clock, cfg) {}
};

struct LogCapture {
  std::vector<std::string> warnings;
  LogCapture() {
    set_log_handler([this](LogLevel level, std::string_view msg) {
      if (level == LogLevel::Warning) warnings.emplace_back(msg);
    });
  }
  ~LogCapture() { set_log_handler(nullptr); }
};

}  // namespace

TEST(Tiling, GridShapes) {
  EXPECT_EQ(grid_shape(1), (std::pair<int, int>{1, 1}));
  EXPECT_EQ(grid_shape(2), (std::pair<int, int>{2, 1}));
  EXPECT_EQ(grid_shape(4), (std::pair<int, int>{2, 2}));
  EXPECT_EQ(grid_shape(5), (std::pair<int, int>{3, 2}));
  EXPECT_EQ(grid_shape(9), (std::pair<int, int>{3, 3}));
}

TEST(Tiling, FourFramesRowMajor) {
  std::vector<ImageRef> frames = {solid_frame("a", 10), solid_frame("b", 20), solid_frame("c", 30),
                                  solid_frame("d", 40)};
  const auto tile = tile_frames(frames);
  ASSERT_TRUE(tile.has_pixels());
  EXPECT_EQ(tile.pixels->width, 4);
  EXPECT_EQ(tile.pixels->height, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      const int cell = (y / 2) * 2 + (x / 2);
      EXPECT_EQ(tile.pixels->rgb[tile.pixels->offset(x, y)], 10 * (cell + 1)) << x << "," << y;
    }
  }
  EXPECT_EQ(tile.id, "tile:a+b+c+d");
}

TEST(Tiling, OddCountsLeaveBlankCells) {
  std::vector<ImageRef> frames = {solid_frame("a", 10), solid_frame("b", 20), solid_frame("c", 30)};
  const auto tile = tile_frames(frames);
  EXPECT_EQ(tile.pixels->width, 4);
  EXPECT_EQ(tile.pixels->height, 4);
  EXPECT_EQ(tile.pixels->rgb[tile.pixels->offset(0, 2)], 30);
  EXPECT_EQ(tile.pixels->rgb[tile.pixels->offset(3, 3)], 0);
}

TEST(Tiling, SingleFramePassesThrough) {
  std::vector<ImageRef> frames = {solid_frame("a", 10)};
  const auto tile = tile_frames(frames);
  EXPECT_EQ(tile.id, "a");
  EXPECT_EQ(tile.pixels, frames[0].pixels);
}

TEST(Tiling, TooManyFrames) {
  std::vector<ImageRef> frames(10, solid_frame("a", 1));
  try {
    tile_frames(frames);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyFrames);
  }
}

TEST(Tiling, PixelLessFramesKeepTag) {
  std::vector<ImageRef> frames(2);
  frames[0].id = "x";
  frames[1].id = "y";
  frames[0].tag = frames[1].tag = "b9";
  const auto tile = tile_frames(frames);
  EXPECT_FALSE(tile.has_pixels());
  EXPECT_EQ(tile.tag, "b9");
}

TEST(Gate, ScriptedHands) {
  MockHandDetector d;
  EXPECT_TRUE(gate_batch(batch("b1", 0, true), d));
  EXPECT_FALSE(gate_batch(batch("b2", 0, false), d));
}

TEST(Gate, DetectorErrorIsFalseWithWarning) {
  LogCapture logs;
  MockHandDetector d;
  d.fail_on("b3");
  EXPECT_FALSE(gate_batch(batch("b3", 0, true), d));
  ASSERT_EQ(logs.warnings.size(), 1u);
  EXPECT_NE(logs.warnings[0].find("b3"), std::string::npos);
}

TEST(Pipeline, HandsTrueInsertsRecord) {
  Rig rig;
  rig.vlm->script("b17", R"({"activity":"placing keys in drawer","objects":["Keys"],"background":"wooden desk"})");
  const auto out = rig.pipeline.ingest(batch("b17", 0, true), study_map());
  ASSERT_TRUE(out.record);
  EXPECT_EQ(out.record->activity, "placing keys in drawer");
  EXPECT_EQ(out.record->objects_in_hand, std::vector<std::string>{"keys"});
  EXPECT_EQ(out.record->background, "wooden desk");
  EXPECT_EQ(out.record->location, "study");
  EXPECT_EQ(out.record->source_batch, "b17");
  EXPECT_EQ(out.estimate.room_label, "study");
  EXPECT_EQ(out.record->embedding,
            rig.text->embed_text("placing keys in drawer | objects: keys | at study | near wooden desk"));
  EXPECT_EQ(rig.db.filter_exact("keys").size(), 1u);
  EXPECT_EQ(rig.vlm->call_count(), 1u);
}

TEST(Pipeline, HandsFalseOnlyLocates) {
  Rig rig;
  const auto out = rig.pipeline.ingest(batch("b1", 0, false, 1), study_map());
  EXPECT_FALSE(out.record);
  EXPECT_EQ(out.estimate.room_label, "kitchen");
  EXPECT_EQ(out.timings.vlm, Duration{0});
  EXPECT_EQ(rig.vlm->call_count(), 0u);
  EXPECT_EQ(rig.db.size(), 0u);
}

TEST(Pipeline, VlmFailureSkipsRecord) {
  LogCapture logs;
  Rig rig;
  rig.vlm->fail_with("b1", ErrorCode::ProviderUnavailable);
  rig.vlm->script("b2", "???");
  const auto a = rig.pipeline.ingest(batch("b1", 0, true), study_map());
  const auto b = rig.pipeline.ingest(batch("b2", 1, true), study_map());
  EXPECT_FALSE(a.record);
  EXPECT_FALSE(b.record);
  EXPECT_EQ(a.skipped, ErrorCode::ProviderUnavailable);
  EXPECT_EQ(b.skipped, ErrorCode::MalformedProviderOutput);
  EXPECT_EQ(a.estimate.room_label, "study");
  EXPECT_EQ(rig.pipeline.metrics().skipped, 2u);
  EXPECT_EQ(rig.db.size(), 0u);
}

TEST(Pipeline, PreviousActivityContext) {
  Rig rig;
  rig.vlm->script("b1", R"({"activity":"opening drawer","objects":[],"background":"desk"})");
  rig.vlm->script("b2", R"({"activity":"placing keys in drawer","objects":["keys"],"background":"desk"})");
  rig.pipeline.ingest(batch("b1", 0, true), study_map());
  rig.pipeline.ingest(batch("b2", 1, true), study_map());
  const auto ctx = rig.vlm->context_log();
  ASSERT_EQ(ctx.size(), 2u);
  EXPECT_EQ(ctx[0], "");
  EXPECT_EQ(ctx[1], "opening drawer");
  EXPECT_EQ(rig.pipeline.previous_activity("s1"), "placing keys in drawer");
}

TEST(Pipeline, ExplicitPreviousActivity) {
  Rig rig;
  rig.vlm->script("b1", R"({"activity":"a","objects":[],"background":"desk"})");
  rig.pipeline.process_batch(batch("b1", 0, true), study_map(), "washing dishes");
  EXPECT_EQ(rig.vlm->context_log().at(0), "washing dishes");
}

TEST(Pipeline, OutOfOrderBatchRejected) {
  Rig rig;
  rig.pipeline.ingest(batch("b1", 5, false), study_map());
  try {
    rig.pipeline.ingest(batch("b2", 5, false), study_map());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfOrderTimestamp);
  }
  EXPECT_NO_THROW(rig.pipeline.ingest(batch("b3", 1, false, 0, "s2"), study_map()));
}

TEST(Pipeline, DimMismatchPropagates) {
  Rig rig;
  auto b = batch("b1", 0, false);
  b.frames[0].embedding = basis(8, 0);
  EXPECT_THROW(rig.pipeline.ingest(b, study_map()), Error);
}

TEST(Pipeline, GatingInvariantAndLossless) {
  Rig rig;
  Rng rng(33);
  std::size_t hands_true = 0;
  for (int i = 0; i < 200; ++i) {
    const bool h = rng.bernoulli(0.3);
    hands_true += h;
    auto b = batch("b" + std::to_string(i), i, h, rng.index(2));
    rig.vlm->script(b.batch_id, R"({"activity":"x","objects":["cup"],"background":"y"})");
    rig.pipeline.ingest(b, study_map());
  }
  EXPECT_EQ(rig.vlm->call_count(), hands_true);
  EXPECT_EQ(rig.pipeline.metrics().batches, 200u);
  EXPECT_EQ(rig.pipeline.traces().size(), 200u);
  EXPECT_EQ(rig.db.size(), hands_true);
}

TEST(Pipeline, StageTimingsOnManualClock) {
  IngestConfig cfg;
  cfg.preprocess_latency = {1.0, 0.0};
  auto clock = std::make_shared<ManualClock>();
  auto vlm = std::make_shared<MockVisionLanguageModel>(clock, MockLatency{2.0, 0.0});
  vlm->script("b1", R"({"activity":"x","objects":["cup"],"background":"y"})");
  ActivitiesDB db(64);
  IngestPipeline p(IngestProviders{std::make_shared<MockImageEmbedder>(64, kMockSeed, clock, MockLatency{0.5, 0.0}),
                                   std::make_shared<MockTextEmbedder>(64, kMockSeed, clock, MockLatency{0.25, 0.0}),
                                   vlm, std::make_shared<MockHandDetector>()},
                   db, clock, cfg);
  const auto out = p.ingest(batch("b1", 0, true), study_map());
  EXPECT_DOUBLE_EQ(to_seconds(out.timings.preprocess), 1.0);
  EXPECT_DOUBLE_EQ(to_seconds(out.timings.location), 0.5);
  EXPECT_DOUBLE_EQ(to_seconds(out.timings.vlm), 2.0);
  EXPECT_DOUBLE_EQ(to_seconds(out.timings.total), 3.75);
}

TEST(FrameBatchJson, ScenarioLine) {
  const auto j = nlohmann::json::parse(
      R"({"batch_id":"b17","t":"2024-05-14T15:05:00Z","hands":true,"embeddings":[[1,0],[0,1]],
          "vlm":{"activity":"placing keys in drawer","objects":["keys"],"background":"wooden desk"}})");
  const auto b = batch_from_json(j);
  EXPECT_EQ(b.batch_id, "b17");
  EXPECT_EQ(b.session_id, "default");
  EXPECT_EQ(b.frames.size(), 2u);
  EXPECT_EQ(b.frames[1].embedding, EmbeddingVector({0.0, 1.0}));
  EXPECT_EQ(b.frames[0].tag, "b17");
  ASSERT_TRUE(b.hands);
  EXPECT_TRUE(*b.hands);
  EXPECT_EQ(parse_vlm_reply(*b.vlm_reply).objects_in_hand, std::vector<std::string>{"keys"});
  const auto again = batch_from_json(batch_to_json(b));
  EXPECT_EQ(again.frames.size(), 2u);
  EXPECT_EQ(again.captured_at, b.captured_at);
}

TEST(FrameBatchJson, FrameSpecsAndErrors) {
  const auto b = batch_from_json(nlohmann::json::parse(R"({"batch_id":"c1","t":12.5,"frames":["color:#00ff00","cam/1"]})"));
  EXPECT_TRUE(b.frames[0].has_pixels());
  EXPECT_FALSE(b.frames[1].has_pixels());
  EXPECT_FALSE(b.hands);
  EXPECT_THROW(batch_from_json(nlohmann::json::parse(R"({"t":1})")), Error);
}
