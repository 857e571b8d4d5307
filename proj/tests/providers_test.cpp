#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "providers/image.hpp"
#include "providers/mock.hpp"
#include "providers/prompts.hpp"
#include "providers/remote.hpp"
#include "store/activities_db.hpp"
#include "stub_server.hpp"

using namespace mempal;
using mempal::testing::StubServer;

namespace {

const std::vector<std::string> kFig7Objects = {
    "folder", "cup",     "phone", "bottle",           "medication", "glasses", "headphones",
    "book",   "charger", "remote", "id card",         "ring",       "wallet",  "watch",
    "magnifying glass",  "tape",  "scissors",         "ruler",      "mouse",   "keys"};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

ProviderConfig remote(const std::string& url, int retries = 2) {
  ProviderConfig c;
  c.kind = ProviderConfig::Kind::RemoteHttp;
  c.endpoint = url;
  c.timeout = std::chrono::milliseconds(2000);
  c.retry_budget = retries;
  c.backoff_base = std::chrono::milliseconds(1);
  return c;
}

}  // namespace

TEST(Embedding, RejectsNonFinite) {
  EXPECT_EQ(code_of([] { EmbeddingVector({1.0, std::nan("")}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { EmbeddingVector({0.0, 0.0}).normalized(); }), ErrorCode::ZeroVector);
}

TEST(MockTextEmbedder, UnitLengthAndDeterministic) {
  MockTextEmbedder e;
  const auto v = e.embed_text("keys");
  EXPECT_EQ(v.dim(), 64u);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  EXPECT_EQ(v, e.embed_text("keys"));
  MockTextEmbedder other;
  EXPECT_EQ(v, other.embed_text("keys"));
}

TEST(MockTextEmbedder, EmptyTextRejected) {
  MockTextEmbedder e;
  EXPECT_EQ(code_of([&] { e.embed_text("   "); }), ErrorCode::EmptyText);
}

TEST(MockTextEmbedder, Fig7ObjectsAreDistinct) {
  MockTextEmbedder e;
  std::vector<EmbeddingVector> vs;
  for (const auto& o : kFig7Objects) vs.push_back(e.embed_text(o));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      EXPECT_LT(cosine(vs[i], vs[j]), 0.999) << kFig7Objects[i] << " vs " << kFig7Objects[j];
    }
  }
  EXPECT_LT(cosine(e.embed_text("keys"), e.embed_text("wallet")), 1.0);
}

TEST(MockTextEmbedder, AliasesShareDirection) {
  MockTextEmbedder e;
  EXPECT_NEAR(cosine(e.embed_text("spectacles"), e.embed_text("glasses")), 1.0, 1e-12);
}

TEST(MockTextEmbedder, DimensionConsistentOverRandomTexts) {
  MockTextEmbedder e(48);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    std::string text;
    for (int w = 0; w < 1 + static_cast<int>(rng.index(6)); ++w) text += "w" + std::to_string(rng.index(1000)) + " ";
    EXPECT_EQ(e.embed_text(text).dim(), 48u);
  }
}

TEST(VlmReply, ParsesStructuredReply) {
  const auto d = parse_vlm_reply(
      R"({"activity":"placing keys in drawer","objects":[" Keys","keys"],"background":"wooden desk with lamp"})");
  EXPECT_EQ(d.activity, "placing keys in drawer");
  EXPECT_EQ(d.objects_in_hand, std::vector<std::string>{"keys"});
  EXPECT_EQ(d.background, "wooden desk with lamp");
}

TEST(VlmReply, MalformedRejected) {
  EXPECT_EQ(code_of([] { parse_vlm_reply("???"); }), ErrorCode::MalformedProviderOutput);
  EXPECT_EQ(code_of([] { parse_vlm_reply(R"({"activity": 3})"); }), ErrorCode::MalformedProviderOutput);
}

TEST(MockVlm, ReplaysScriptByBatch) {
  MockVisionLanguageModel vlm;
  vlm.script("b17", R"({"activity":"placing keys in drawer","objects":["keys"],"background":"wooden desk with lamp"})");
  vlm.script("b18", R"({"activity":"","objects":[],"background":"hallway"})");
  vlm.script("b19", "???");
  ImageRef img;
  img.tag = "b17";
  const auto d = vlm.describe(img, "", "describe");
  EXPECT_EQ(d, (VlmDescription{"placing keys in drawer", {"keys"}, "wooden desk with lamp"}));
  img.tag = "b18";
  EXPECT_EQ(vlm.describe(img, "prev", "describe"), (VlmDescription{"", {}, "hallway"}));
  img.tag = "b19";
  EXPECT_EQ(code_of([&] { vlm.describe(img, "", "describe"); }), ErrorCode::MalformedProviderOutput);
  EXPECT_EQ(vlm.call_count(), 3u);
  EXPECT_EQ(vlm.context_log()[1], "prev");
}

TEST(MockLlm, TemplateOverFirstDoc) {
  MockLanguageModel llm;
  const std::vector<std::string> docs = {"2:14pm | kitchen | cup | marble counter"};
  EXPECT_EQ(llm.complete("where is the cup", docs), "Your cup was last seen at 2:14pm in the kitchen near marble counter");
  EXPECT_EQ(llm.complete("where is the cup", docs), llm.complete("where is the cup", docs));
  EXPECT_EQ(llm.complete("where is the cup", {}), "I'm not sure");
}

TEST(MockLlm, NoMentionMeansNoEvidence) {
  MockLanguageModel llm;
  const std::vector<std::string> docs = {"2:14pm | kitchen | cup | marble counter | drinking tea"};
  EXPECT_EQ(llm.complete("Question: where is my wallet", docs), "I'm not sure");
}

TEST(MockLlm, ForcedFailure) {
  MockLanguageModel llm;
  llm.fail_next(1);
  EXPECT_EQ(code_of([&] { llm.complete("q", {}); }), ErrorCode::ProviderUnavailable);
  EXPECT_EQ(llm.complete("q", {}), "I'm not sure");
}

TEST(MockTranscriber, PassThrough) {
  MockTranscriber t;
  EXPECT_EQ(t.transcribe(AudioRef{"Pal, where are my keys?", {}}), "Pal, where are my keys?");
  EXPECT_EQ(code_of([&] { t.transcribe(AudioRef{}); }), ErrorCode::NoTranscriptAttached);
}

TEST(MockLatency, SpendsOnManualClock) {
  auto clock = std::make_shared<ManualClock>();
  MockTextEmbedder e(64, kMockSeed, clock, MockLatency{0.5, 0.0});
  e.embed_text("cup");
  EXPECT_DOUBLE_EQ(to_seconds(clock->now()), 0.5);
}

TEST(Prompts, VersionedAssetRenders) {
  const auto p = render_vlm_prompt(default_vlm_prompt(), "washing dishes");
  EXPECT_NE(p.find("washing dishes"), std::string::npos);
  EXPECT_EQ(p.find("{previous_activity}"), std::string::npos);
  EXPECT_EQ(kVlmPromptId, "vlm_describe/v1");
}

TEST(Image, PpmRoundTripAndBase64) {
  auto img = Image::solid(3, 2, 10, 20, 30);
  img.rgb[img.offset(2, 1)] = 255;
  EXPECT_EQ(decode_ppm(encode_ppm(img)), img);
  const std::string bytes = encode_ppm(img);
  EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
}

TEST(Image, FrameSpecs) {
  const auto f = frame_from_spec("color:#ff0000", "");
  ASSERT_TRUE(f.has_pixels());
  EXPECT_EQ(f.pixels->width, 32);
  EXPECT_EQ(f.pixels->rgb[0], 255);
  EXPECT_FALSE(frame_from_spec("cam0/000123", "").has_pixels());
}

TEST(ProviderConfig, Validation) {
  ProviderConfig c;
  c.kind = ProviderConfig::Kind::RemoteHttp;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
  c.endpoint = "http://localhost:1/x";
  c.timeout = std::chrono::milliseconds(0);
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
}

TEST(RemoteProviders, TranscriberAgainstStub) {
  StubServer server([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    EXPECT_TRUE(body.contains("audio"));
    res.set_content(R"({"text":"pal where is my wallet"})", "application/json");
  });
  RemoteTranscriber t(remote(server.url("/transcribe")), std::make_shared<ManualClock>());
  EXPECT_EQ(t.transcribe(AudioRef{std::nullopt, "RIFF...."}), "pal where is my wallet");
}

TEST(RemoteProviders, EmbedderDimChecked) {
  StubServer server([](const httplib::Request& req, httplib::Response& res) {
    EXPECT_EQ(nlohmann::json::parse(req.body).at("text"), "keys");
    res.set_content(R"({"embedding":[0.6,0.8]})", "application/json");
  });
  auto clock = std::make_shared<ManualClock>();
  RemoteTextEmbedder ok(remote(server.url("/embed")), 2, clock);
  EXPECT_EQ(ok.embed_text("keys"), EmbeddingVector({0.6, 0.8}));
  RemoteTextEmbedder wrong(remote(server.url("/embed")), 3, clock);
  EXPECT_EQ(code_of([&] { wrong.embed_text("keys"); }), ErrorCode::DimMismatch);
}

TEST(RemoteProviders, RetriesServerErrorsThenGivesUp) {
  StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  auto clock = std::make_shared<ManualClock>();
  RemoteLanguageModel llm(remote(server.url("/llm"), 2), clock);
  EXPECT_EQ(code_of([&] { llm.complete("q", {}); }), ErrorCode::ProviderUnavailable);
  EXPECT_EQ(server.hits(), 3);
  // Backoff 1 ms then 2 ms, spent on the injected clock.
  EXPECT_EQ(clock->now(), std::chrono::milliseconds(3));
}

TEST(RemoteProviders, ClientErrorNotRetried) {
  StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  RemoteLanguageModel llm(remote(server.url("/llm"), 2), std::make_shared<ManualClock>());
  EXPECT_EQ(code_of([&] { llm.complete("q", {}); }), ErrorCode::ProviderUnavailable);
  EXPECT_EQ(server.hits(), 1);
}

TEST(RemoteProviders, RecoversWithinBudget) {
  std::atomic<int> n{0};
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    if (n++ == 0) {
      res.status = 500;
      return;
    }
    const auto body = nlohmann::json::parse(req.body);
    EXPECT_EQ(body.at("context").size(), 1u);
    res.set_content(R"({"text":"Your cup was last seen at 2:14pm in the kitchen"})", "application/json");
  });
  RemoteLanguageModel llm(remote(server.url("/llm")), std::make_shared<ManualClock>());
  const std::vector<std::string> docs = {"2:14pm | kitchen | cup | marble counter"};
  EXPECT_EQ(llm.complete("where is the cup", docs), "Your cup was last seen at 2:14pm in the kitchen");
}

TEST(RemoteProviders, UnreachableEndpoint) {
  RemoteLanguageModel llm(remote("http://127.0.0.1:9/llm", 1), std::make_shared<ManualClock>());
  EXPECT_EQ(code_of([&] { llm.complete("q", {}); }), ErrorCode::ProviderUnavailable);
}

TEST(RemoteProviders, VlmWireFormat) {
  StubServer server([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    EXPECT_EQ(body.at("batch_id"), "b17");
    EXPECT_EQ(body.at("previous_activity"), "opening drawer");
    EXPECT_EQ(body.at("image_format"), "ppm");
    EXPECT_EQ(body.at("images").size(), 1u);
    res.set_content(R"({"activity":"placing keys in drawer","objects":["keys"],"background":"wooden desk"})",
                    "application/json");
  });
  RemoteVisionLanguageModel vlm(remote(server.url("/vlm")), std::make_shared<ManualClock>());
  ImageRef img = frame_from_spec("color:#102030", "");
  img.tag = "b17";
  const auto d = vlm.describe(img, "opening drawer", "describe");
  EXPECT_EQ(d.objects_in_hand, std::vector<std::string>{"keys"});
}

TEST(RemoteProviders, MockReplayEquivalence) {
  // A remote provider and a mock replaying the recorded reply agree.
  const std::string recorded = R"({"activity":"placing keys in drawer","objects":["keys"],"background":"wooden desk"})";
  StubServer server([&](const httplib::Request&, httplib::Response& res) { res.set_content(recorded, "application/json"); });
  RemoteVisionLanguageModel remote_vlm(remote(server.url("/vlm")), std::make_shared<ManualClock>());
  MockVisionLanguageModel mock_vlm;
  mock_vlm.script("b1", recorded);
  ImageRef img = frame_from_spec("color:#102030", "");
  img.tag = "b1";
  EXPECT_EQ(remote_vlm.describe(img, "", "p"), mock_vlm.describe(img, "", "p"));
}
