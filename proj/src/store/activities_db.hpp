#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "store/activity_record.hpp"

namespace mempal {

// dot(a, b) / (|a| |b|), clamped to [-1, 1].
// Throws DimMismatch for unequal dims and ZeroVector if either is all-zero.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct RetrievalResult {
  RecordPtr record;
  double score = 0.0;
};

// Result ordering: score descending, then newer timestamp, then larger id.
bool retrieval_before(const RetrievalResult& a, const RetrievalResult& b);

inline constexpr std::size_t kDefaultTopK = 10;

class ActivitiesDB;

// A fixed prefix of the diary. Records appended after the snapshot was
// taken are invisible to it, so one query sees one consistent diary.
class DiarySnapshot {
 public:
  std::size_t size() const { return count_; }
  std::size_t dim() const;

  // All records whose objects_in_hand contains the normalized object,
  // chronologically ascending (ties by id).
  std::vector<RecordPtr> filter_exact(std::string_view object) const;
  std::vector<RetrievalResult> topk(const EmbeddingVector& query, std::size_t k = kDefaultTopK) const;
  RecordPtr find(RecordId id) const;
  std::vector<RecordPtr> records() const;
  // Session records strictly before `anchor` in time, newest first.
  std::vector<RecordPtr> preceding(const ActivityRecord& anchor, std::size_t n) const;

 private:
  friend class ActivitiesDB;
  DiarySnapshot(const ActivitiesDB* db, std::size_t count) : db_(db), count_(count) {}

  const ActivitiesDB* db_;
  std::size_t count_;
};

// Append-only embedded diary with an exact object index and exhaustive
// cosine top-k. Single writer, many readers. When a log file is attached,
// each insert is appended as one JSON line before it becomes visible.
class ActivitiesDB {
 public:
  explicit ActivitiesDB(std::size_t dim);
  ActivitiesDB(const ActivitiesDB&) = delete;
  ActivitiesDB& operator=(const ActivitiesDB&) = delete;

  std::size_t dim() const { return dim_; }
  std::size_t size() const;

  // Assigns the next id when record.id is unset. Throws DimMismatch,
  // OutOfOrderTimestamp (older than the session's last record) or
  // InvalidArgument (duplicate id).
  RecordId insert(ActivityRecord record);

  std::vector<RecordPtr> filter_exact(std::string_view object) const;
  std::vector<RetrievalResult> topk(const EmbeddingVector& query, std::size_t k = kDefaultTopK) const;
  RecordPtr find(RecordId id) const;
  std::vector<RecordPtr> records() const;
  std::vector<RecordPtr> records_between(std::optional<Timestamp> since, std::optional<Timestamp> until) const;
  DiarySnapshot snapshot() const;

  // Objects currently indexed, sorted.
  std::vector<std::string> indexed_objects() const;

  // JSON Lines, one record per line, in insertion order.
  void write_jsonl(std::ostream& out) const;
  std::string export_jsonl() const;
  // Inserts every line of a diary stream; the object index is rebuilt as a
  // side effect. Returns the number of records read.
  std::size_t import_jsonl(std::istream& in);

  // Loads an existing diary file (if any), then appends future inserts to it.
  void attach_log(const std::filesystem::path& path);

 private:
  friend class DiarySnapshot;

  std::vector<RecordPtr> filter_exact_upto(std::string_view object, std::size_t count) const;
  std::vector<RetrievalResult> topk_upto(const EmbeddingVector& query, std::size_t k, std::size_t count) const;
  RecordPtr find_upto(RecordId id, std::size_t count) const;

  std::size_t dim_;
  mutable std::shared_mutex mu_;
  std::vector<RecordPtr> records_;
  std::unordered_map<std::string, std::vector<std::size_t>> object_index_;
  std::unordered_map<std::uint64_t, std::size_t> id_index_;
  std::map<std::string, Timestamp> session_last_;
  std::uint64_t next_id_ = 1;
  std::ofstream log_;
};

}  // namespace mempal
