#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "store/activities_db.hpp"
#include "support.hpp"

using namespace mempal;
using namespace mempal::testing;

namespace {

double naive_cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TEST(Cosine, IdentityAndOrthogonal) {
  Rng rng(1);
  const auto v = random_unit(rng, 64);
  EXPECT_NEAR(cosine(v, v), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(cosine(basis(64, 0), basis(64, 1)), 0.0);
}

TEST(Cosine, MatchesNaiveOracle) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> a(64), b(64);
    for (auto& x : a) x = rng.normal() * 3;
    for (auto& x : b) x = rng.normal();
    EmbeddingVector va(a), vb(b);
    EXPECT_NEAR(cosine(va, vb), naive_cosine(va, vb), 1e-12);
  }
}

TEST(Cosine, Errors) {
  try {
    cosine(basis(3, 0), basis(4, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
  try {
    cosine(EmbeddingVector({0.0, 0.0}), basis(2, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVector);
  }
}

TEST(ActivitiesDB, InsertIndexesObjects) {
  ActivitiesDB db(4);
  const auto id = db.insert(make_record("s", at_clock(14, 14), "kitchen", "holding keys", {"Keys"}, "", basis(4, 0)));
  const auto hits = db.filter_exact("keys");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0]->id, id);
  EXPECT_EQ(db.indexed_objects(), std::vector<std::string>{"keys"});
}

TEST(ActivitiesDB, FilterExactChronological) {
  ActivitiesDB db(4);
  db.insert(make_record("s", at_clock(14, 14), "kitchen", "a", {"keys"}, "", basis(4, 0)));
  db.insert(make_record("s", at_clock(14, 30), "kitchen", "b", {"cup"}, "", basis(4, 1)));
  db.insert(make_record("s", at_clock(15, 5), "study", "c", {"keys", "cup"}, "", basis(4, 2)));
  const auto keys = db.filter_exact("Keys ");
  ASSERT_EQ(keys.size(), 2u);
  EXPECT_EQ(keys[0]->timestamp, at_clock(14, 14));
  EXPECT_EQ(keys[1]->timestamp, at_clock(15, 5));
  EXPECT_EQ(db.filter_exact("cup").size(), 2u);
  EXPECT_TRUE(db.filter_exact("wallet").empty());
}

TEST(ActivitiesDB, RejectsBadInserts) {
  ActivitiesDB db(4);
  db.insert(make_record("s", at_clock(15, 0), "kitchen", "a", {"keys"}, "", basis(4, 0)));
  try {
    db.insert(make_record("s", at_clock(15, 0), "kitchen", "a", {}, "", basis(3, 0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
  try {
    db.insert(make_record("s", at_clock(14, 0), "kitchen", "a", {}, "", basis(4, 0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfOrderTimestamp);
  }
  // Other sessions keep their own clocks.
  EXPECT_NO_THROW(db.insert(make_record("other", at_clock(14, 0), "kitchen", "a", {}, "", basis(4, 0))));
}

TEST(ActivitiesDB, TopkSmallDbReturnsAll) {
  ActivitiesDB db(4);
  for (int i = 0; i < 3; ++i) db.insert(make_record("s", at_clock(10, i), "k", "a", {}, "", basis(4, i)));
  EXPECT_EQ(db.topk(basis(4, 0), 10).size(), 3u);
  EXPECT_EQ(db.topk(basis(4, 0)).size(), 3u);
}

TEST(ActivitiesDB, TopkTiesPreferNewer) {
  ActivitiesDB db(2);
  const auto a = db.insert(make_record("s", at_clock(10, 0), "k", "a", {}, "", basis(2, 0)));
  const auto b = db.insert(make_record("s", at_clock(11, 0), "k", "a", {}, "", basis(2, 0)));
  const auto hits = db.topk(basis(2, 0), 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].record->id, b);
  EXPECT_EQ(hits[1].record->id, a);
}

TEST(ActivitiesDB, TopkMatchesExhaustiveSort) {
  Rng rng(3);
  ActivitiesDB db(64);
  for (int i = 0; i < 200; ++i) {
    db.insert(make_record("s", at_clock(8, 0, 0) + std::chrono::seconds(i), "k", "a", {}, "", random_unit(rng, 64)));
  }
  for (int q = 0; q < 20; ++q) {
    const auto query = random_unit(rng, 64);
    std::vector<RetrievalResult> all;
    for (const auto& r : db.records()) all.push_back({r, naive_cosine(query, r->embedding)});
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
      if (x.score != y.score) return x.score > y.score;
      return x.record->timestamp > y.record->timestamp;
    });
    const auto got = db.topk(query, 10);
    ASSERT_EQ(got.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_EQ(got[i].record->id, all[i].record->id);
      EXPECT_NEAR(got[i].score, all[i].score, 1e-12);
    }
  }
}

TEST(ActivitiesDB, SnapshotIsStable) {
  ActivitiesDB db(2);
  db.insert(make_record("s", at_clock(10, 0), "k", "a", {"cup"}, "", basis(2, 0)));
  const auto snap = db.snapshot();
  db.insert(make_record("s", at_clock(11, 0), "k", "a", {"cup"}, "", basis(2, 0)));
  EXPECT_EQ(snap.filter_exact("cup").size(), 1u);
  EXPECT_EQ(snap.topk(basis(2, 0)).size(), 1u);
  EXPECT_EQ(db.filter_exact("cup").size(), 2u);
}

TEST(ActivitiesDB, PrecedingWithinSession) {
  ActivitiesDB db(2);
  db.insert(make_record("s", at_clock(10, 0), "k", "washing cup", {}, "", basis(2, 0)));
  db.insert(make_record("t", at_clock(10, 30), "k", "other session", {}, "", basis(2, 0)));
  db.insert(make_record("s", at_clock(11, 0), "k", "placing keys", {"keys"}, "", basis(2, 0)));
  const auto anchor = db.filter_exact("keys").back();
  const auto prev = db.snapshot().preceding(*anchor, 5);
  ASSERT_EQ(prev.size(), 1u);
  EXPECT_EQ(prev[0]->activity, "washing cup");
}

TEST(ActivitiesDB, JsonlRoundTrip) {
  Rng rng(4);
  ActivitiesDB db(8);
  for (int i = 0; i < 30; ++i) {
    db.insert(make_record("s", at_clock(9, i), i % 2 ? "kitchen" : "study", "act " + std::to_string(i),
                          {i % 3 ? "cup" : "keys"}, "bg", random_unit(rng, 8), "b" + std::to_string(i)));
  }
  std::stringstream ss(db.export_jsonl());
  ActivitiesDB copy(8);
  EXPECT_EQ(copy.import_jsonl(ss), 30u);
  EXPECT_EQ(copy.export_jsonl(), db.export_jsonl());
  const auto q = random_unit(rng, 8);
  const auto a = db.topk(q), b = copy.topk(q);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].record->id, b[i].record->id);
    EXPECT_EQ(a[i].score, b[i].score);
  }
  EXPECT_EQ(copy.filter_exact("keys").size(), db.filter_exact("keys").size());
}

TEST(ActivitiesDB, LogFileReload) {
  TempDir dir;
  const auto path = dir.path() / "diary.jsonl";
  {
    ActivitiesDB db(2);
    db.attach_log(path);
    db.insert(make_record("s", at_clock(10, 0), "k", "a", {"cup"}, "", basis(2, 0)));
    db.insert(make_record("s", at_clock(10, 1), "k", "b", {"keys"}, "", basis(2, 1)));
  }
  ActivitiesDB db(2);
  db.attach_log(path);
  EXPECT_EQ(db.size(), 2u);
  const auto id = db.insert(make_record("s", at_clock(10, 2), "k", "c", {"cup"}, "", basis(2, 1)));
  EXPECT_EQ(id.value, 3u);
  ActivitiesDB again(2);
  again.attach_log(path);
  EXPECT_EQ(again.filter_exact("cup").size(), 2u);
}

TEST(ActivityRecord, JsonCarriesSchema) {
  const auto r = make_record("s", at_clock(15, 5), "study", "placing keys in drawer", {"keys"}, "wooden desk",
                             basis(2, 0), "b17");
  const auto j = record_to_json(r);
  EXPECT_EQ(j.at("schema"), kDiarySchemaVersion);
  const auto back = record_from_json(j);
  EXPECT_EQ(back.activity, r.activity);
  EXPECT_EQ(back.timestamp, r.timestamp);
  EXPECT_EQ(back.embedding, r.embedding);
}

TEST(ActivityRecord, ComposedText) {
  EXPECT_EQ(compose_record_text("placing keys in drawer", {"keys", "wallet"}, "study", "wooden desk"),
            "placing keys in drawer | objects: keys,wallet | at study | near wooden desk");
}
