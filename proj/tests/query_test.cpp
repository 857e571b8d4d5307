#include <gtest/gtest.h>

#include "common/error.hpp"
#include "providers/mock.hpp"
#include "query/engine.hpp"
#include "query/intent.hpp"
#include "query/session.hpp"
#include "query/templates.hpp"
#include "support.hpp"

using namespace mempal;
using namespace mempal::testing;

namespace {

struct Diary {
  std::shared_ptr<MockTextEmbedder> embedder = std::make_shared<MockTextEmbedder>();
  std::shared_ptr<MockLanguageModel> llm = std::make_shared<MockLanguageModel>();
  ActivitiesDB db{64};
  QueryEngine engine{embedder, llm, std::make_shared<ManualClock>()};

  RecordId add(Timestamp t, std::string location, std::string activity, std::vector<std::string> objects,
               std::string background, std::string session = "default") {
    auto emb = embedder->embed_text(compose_record_text(activity, objects, location, background));
    return db.insert(make_record(std::move(session), t, std::move(location), std::move(activity), std::move(objects),
                                 std::move(background), emb));
  }
};

}  // namespace

TEST(Intent, WhereAreMyKeys) {
  ChatSession s;
  const auto i = parse_query("Pal, where are my keys?", s);
  EXPECT_EQ(i.category, IntentCategory::ObjectLocation);
  EXPECT_EQ(i.object_phrase, "keys");
  EXPECT_TRUE(i.wakeword_present);
}

TEST(Intent, CantFindMyKeys) {
  ChatSession s;
  const auto i = parse_query("I can't find my keys, Pal.", s);
  EXPECT_EQ(i.category, IntentCategory::ObjectLocation);
  EXPECT_EQ(i.object_phrase, "keys");
  EXPECT_TRUE(i.wakeword_present);
}

TEST(Intent, OtherPatterns) {
  ChatSession s;
  EXPECT_EQ(parse_query("I'm looking for the ID card", s).object_phrase, "id card");
  EXPECT_EQ(parse_query("Pal have you seen my magnifying glass?", s).object_phrase, "magnifying glass");
  EXPECT_EQ(parse_query("where's my wallet", s).object_phrase, "wallet");
  EXPECT_EQ(parse_query("Where did I put my phone charger again?", s).object_phrase, "phone charger");
  EXPECT_FALSE(parse_query("where are my keys", s).wakeword_present);
  EXPECT_FALSE(parse_query("my palette is here", s).wakeword_present);
}

TEST(Intent, RecallCategory) {
  ChatSession s;
  const auto i = parse_query("Pal, what did I do before I misplaced my glasses?", s);
  EXPECT_EQ(i.category, IntentCategory::Recall);
  EXPECT_EQ(i.object_phrase, "glasses");
}

TEST(Intent, FollowUpNeedsPriorTurn) {
  ChatSession s;
  EXPECT_EQ(parse_query("Pal, can you be more specific?", s).category, IntentCategory::Unknown);
  s.add_turn(Turn{"Pal, where are my keys?", "Your keys ...", {}, at_clock(15, 0), "keys", std::nullopt});
  EXPECT_EQ(parse_query("Pal, can you be more specific?", s).category, IntentCategory::FollowUp);
  EXPECT_EQ(parse_query("what was I doing right before I saw it?", s).category, IntentCategory::FollowUp);
  EXPECT_EQ(parse_query("Pal, where is my cup?", s).category, IntentCategory::ObjectLocation);
}

TEST(Intent, LlmFallbackOnRuleMiss) {
  ChatSession s;
  MockLanguageModel llm;
  const auto i = parse_query("Pal, I need my wallet", s, &llm);
  EXPECT_EQ(i.category, IntentCategory::ObjectLocation);
  EXPECT_EQ(i.object_phrase, "wallet");
  EXPECT_EQ(parse_query("Pal, what's the weather", s, &llm).category, IntentCategory::Unknown);
  llm.fail_next(1);
  EXPECT_EQ(parse_query("Pal, I need my wallet", s, &llm).category, IntentCategory::Unknown);
}

TEST(Templates, Golden) {
  EXPECT_EQ(format_last_seen("keys", at_clock(15, 5), "study", "wooden desk with lamp"),
            "Your keys was last seen at 3:05pm in the study near wooden desk with lamp.");
  EXPECT_EQ(format_last_seen("keys", at_clock(15, 5), "study", ""), "Your keys was last seen at 3:05pm in the study.");
  EXPECT_EQ(format_last_seen("keys", at_clock(15, 5), "unknown", "desk"), "I'm not sure.");
  EXPECT_EQ(format_last_seen_legacy("keys", "study", "wooden desk with lamp"),
            "Your keys was last seen in the study near wooden desk with lamp.");
  EXPECT_EQ(kNotSureAnswer, "I'm not sure.");
}

TEST(Templates, ContextDoc) {
  const auto r = make_record("s", at_clock(14, 14), "kitchen", "pouring water", {"cup", "bottle"}, "marble counter",
                             basis(2, 0));
  EXPECT_EQ(format_context_doc(r, r.location), "2:14pm | kitchen | cup,bottle | marble counter | pouring water");
}

TEST(Session, BoundedFifo) {
  ChatSession s("x", 3);
  for (int i = 0; i < 5; ++i) s.add_turn(Turn{"q" + std::to_string(i), "a", {}, at_clock(10, i), {}, {}});
  ASSERT_EQ(s.turns().size(), 3u);
  EXPECT_EQ(s.turns().front().query, "q2");
  EXPECT_THROW(s.add_turn(Turn{"late", "a", {}, at_clock(9, 0), {}, {}}), Error);
}

TEST(Answer, ExactPathUsesMostRecent) {
  Diary d;
  d.add(at_clock(14, 14), "kitchen", "holding keys", {"keys"}, "marble counter");
  const auto latest = d.add(at_clock(15, 5), "study", "placing keys in drawer", {"keys"}, "wooden desk with lamp");
  ChatSession s;
  const auto a = d.engine.ask("Pal, where are my keys?", d.db.snapshot(), s, at_clock(16, 0));
  EXPECT_EQ(a.text, "Your keys was last seen at 3:05pm in the study near wooden desk with lamp.");
  EXPECT_EQ(a.path, AnswerPath::ExactMatch);
  EXPECT_EQ(a.supporting_record, latest);
  EXPECT_EQ(s.turns().size(), 1u);
  EXPECT_EQ(d.llm->call_count(), 0u);
}

TEST(Answer, NeverLoggedIsNotSure) {
  Diary d;
  ChatSession s;
  const auto a = d.engine.ask("Pal, where is my wallet?", d.db.snapshot(), s, at_clock(16, 0));
  EXPECT_EQ(a.text, "I'm not sure.");
  EXPECT_EQ(a.path, AnswerPath::NotFound);
  EXPECT_FALSE(a.supporting_record);
}

TEST(Answer, SpectaclesFallsToRag) {
  Diary d;
  d.add(at_clock(9, 0), "kitchen", "pouring water", {"cup"}, "marble counter");
  const auto glasses = d.add(at_clock(10, 30), "bedroom", "putting down glasses", {"glasses"}, "nightstand");
  d.add(at_clock(11, 0), "study", "reading book", {"book"}, "armchair");
  // Oracle: brute-force similarity ranks the glasses record first.
  const auto q = d.embedder->embed_text("Pal, where are my spectacles?");
  double best = -2;
  RecordId best_id;
  for (const auto& r : d.db.records()) {
    const double c = cosine(q, r->embedding);
    if (c > best) best = c, best_id = r->id;
  }
  ASSERT_EQ(best_id, glasses);

  ChatSession s;
  const auto a = d.engine.ask("Pal, where are my spectacles?", d.db.snapshot(), s, at_clock(12, 0));
  EXPECT_EQ(a.path, AnswerPath::Rag);
  EXPECT_EQ(a.supporting_record, glasses);
  EXPECT_EQ(a.text, "Your glasses was last seen at 10:30am in the bedroom near nightstand");
}

TEST(Answer, LlmOutageIsNotSure) {
  Diary d;
  d.add(at_clock(10, 30), "bedroom", "putting down glasses", {"glasses"}, "nightstand");
  d.llm->fail_next(1);
  ChatSession s;
  const auto a = d.engine.ask("Pal, where are my spectacles?", d.db.snapshot(), s, at_clock(12, 0));
  EXPECT_EQ(a.text, "I'm not sure.");
  EXPECT_EQ(a.path, AnswerPath::NotFound);
}

TEST(Answer, FollowUpBeforeUsesPrecedingRecord) {
  Diary d;
  d.add(at_clock(15, 0), "study", "opening the drawer", {}, "wooden desk with lamp");
  d.add(at_clock(15, 5), "study", "placing keys in drawer", {"keys"}, "wooden desk with lamp");
  ChatSession s;
  d.engine.ask("Pal, where are my keys?", d.db.snapshot(), s, at_clock(16, 0));
  const auto a = d.engine.ask("Pal, what was I doing right before I saw it?", d.db.snapshot(), s, at_clock(16, 1));
  EXPECT_EQ(a.intent.category, IntentCategory::FollowUp);
  EXPECT_EQ(a.path, AnswerPath::Rag);
  EXPECT_EQ(a.text, "Right before that, you were opening the drawer in the study at 3:00pm");
  EXPECT_EQ(a.object, "keys");
}

TEST(Answer, FollowUpMoreSpecificKeepsRecord) {
  Diary d;
  d.add(at_clock(15, 0), "study", "opening the drawer", {}, "wooden desk with lamp");
  const auto keys = d.add(at_clock(15, 5), "study", "placing keys in drawer", {"keys"}, "wooden desk with lamp");
  ChatSession s;
  d.engine.ask("Pal, where are my keys?", d.db.snapshot(), s, at_clock(16, 0));
  const auto a = d.engine.ask("Pal, can you be more specific?", d.db.snapshot(), s, at_clock(16, 1));
  EXPECT_EQ(a.supporting_record, keys);
  EXPECT_EQ(a.text,
            "Your keys was last seen at 3:05pm in the study, near wooden desk with lamp, while you were placing keys "
            "in drawer");
}

TEST(Answer, FollowUpEmptySessionThrows) {
  Diary d;
  ChatSession s;
  Intent i;
  i.category = IntentCategory::FollowUp;
  i.raw_text = "can you be more specific?";
  try {
    d.engine.answer_followup(i, d.db.snapshot(), s, at_clock(1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoPriorTurn);
  }
}

TEST(Answer, RecallBeforeMisplacing) {
  Diary d;
  d.add(at_clock(8, 0), "kitchen", "making coffee", {"cup"}, "counter");
  d.add(at_clock(8, 10), "bedroom", "taking off glasses", {"glasses"}, "nightstand");
  ChatSession s;
  const auto a = d.engine.ask("Pal, what did I do before I misplaced my glasses?", d.db.snapshot(), s, at_clock(9, 0));
  EXPECT_EQ(a.intent.category, IntentCategory::Recall);
  EXPECT_EQ(a.text, "Right before that, you were making coffee in the kitchen at 8:00am");
}

TEST(Answer, RoomDisplayRename) {
  Diary d;
  d.add(at_clock(15, 5), "hall", "placing keys", {"keys"}, "coat rack");
  d.engine.set_room_display([](const std::string& l) { return l == "hall" ? std::string("parlor") : l; });
  ChatSession s;
  const auto a = d.engine.ask("Pal, where are my keys?", d.db.snapshot(), s, at_clock(16, 0));
  EXPECT_EQ(a.text, "Your keys was last seen at 3:05pm in the parlor near coat rack.");
}

TEST(Answer, UnknownLocationFallsBack) {
  Diary d;
  const auto id = d.add(at_clock(15, 5), "unknown", "placing keys", {"keys"}, "coat rack");
  ChatSession s;
  const auto a = d.engine.ask("Pal, where are my keys?", d.db.snapshot(), s, at_clock(16, 0));
  EXPECT_EQ(a.text, "I'm not sure.");
  EXPECT_EQ(a.path, AnswerPath::NotFound);
  EXPECT_EQ(a.supporting_record, id);
}

TEST(Answer, CitedRecordsExist) {
  Diary d;
  Rng rng(8);
  const std::vector<std::string> objs = {"keys", "cup", "wallet", "phone", "glasses"};
  const std::vector<std::string> rooms = {"kitchen", "study", "hall"};
  for (int i = 0; i < 60; ++i) {
    d.add(at_clock(8, 0, i * 30), rooms[rng.index(3)], "handling " + objs[rng.index(5)], {objs[rng.index(5)]},
          "table");
  }
  ChatSession s("x");
  const auto snap = d.db.snapshot();
  for (const auto& q : {"where are my keys", "where is my remote", "where are my spectacles", "can you be more specific",
                        "where is my mug"}) {
    const auto a = d.engine.ask(q, snap, s, at_clock(20, 0));
    if (a.path != AnswerPath::NotFound) {
      ASSERT_TRUE(a.supporting_record);
      EXPECT_TRUE(snap.find(*a.supporting_record));
    } else {
      EXPECT_EQ(a.text, "I'm not sure.");
    }
  }
}
