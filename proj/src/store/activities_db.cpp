#include "store/activities_db.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace mempal {

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::DimMismatch, "cosine of dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    dot += av[i] * bv[i];
    na += av[i] * av[i];
    nb += bv[i] * bv[i];
  }
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::ZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

bool retrieval_before(const RetrievalResult& a, const RetrievalResult& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.record->timestamp != b.record->timestamp) return a.record->timestamp > b.record->timestamp;
  return a.record->id > b.record->id;
}

std::size_t DiarySnapshot::dim() const { return db_->dim(); }

std::vector<RecordPtr> DiarySnapshot::filter_exact(std::string_view object) const {
  return db_->filter_exact_upto(object, count_);
}

std::vector<RetrievalResult> DiarySnapshot::topk(const EmbeddingVector& query, std::size_t k) const {
  return db_->topk_upto(query, k, count_);
}

RecordPtr DiarySnapshot::find(RecordId id) const { return db_->find_upto(id, count_); }

std::vector<RecordPtr> DiarySnapshot::records() const {
  std::shared_lock lock(db_->mu_);
  return {db_->records_.begin(), db_->records_.begin() + static_cast<std::ptrdiff_t>(count_)};
}

std::vector<RecordPtr> DiarySnapshot::preceding(const ActivityRecord& anchor, std::size_t n) const {
  std::vector<RecordPtr> out;
  std::shared_lock lock(db_->mu_);
  for (std::size_t i = count_; i-- > 0 && out.size() < n;) {
    const auto& r = db_->records_[i];
    if (r->session_id == anchor.session_id && r->timestamp < anchor.timestamp) out.push_back(r);
  }
  return out;
}

ActivitiesDB::ActivitiesDB(std::size_t dim) : dim_(dim) {
  if (dim == 0) fail(ErrorCode::InvalidArgument, "diary dimension must be positive");
}

std::size_t ActivitiesDB::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

RecordId ActivitiesDB::insert(ActivityRecord record) {
  if (record.embedding.dim() != dim_) {
    fail(ErrorCode::DimMismatch, "record embedding has dim " + std::to_string(record.embedding.dim()) +
                                     ", diary dim is " + std::to_string(dim_));
  }
  record.objects_in_hand = normalize_object_list(record.objects_in_hand);
  if (record.session_id.empty()) record.session_id = "default";

  std::unique_lock lock(mu_);
  if (auto it = session_last_.find(record.session_id);
      it != session_last_.end() && record.timestamp < it->second) {
    fail(ErrorCode::OutOfOrderTimestamp, "record at " + format_rfc3339(record.timestamp) +
                                             " is older than the last record of session '" +
                                             record.session_id + "'");
  }
  if (!record.id.valid()) {
    record.id = RecordId{next_id_};
  } else if (id_index_.count(record.id.value)) {
    fail(ErrorCode::InvalidArgument, "duplicate record id " + std::to_string(record.id.value));
  }

  if (log_.is_open()) {
    log_ << record_to_json(record).dump() << '\n';
    log_.flush();
    if (!log_) fail(ErrorCode::Io, "failed to append to diary log");
  }

  const std::size_t idx = records_.size();
  auto ptr = std::make_shared<const ActivityRecord>(std::move(record));
  for (const auto& o : ptr->objects_in_hand) object_index_[o].push_back(idx);
  id_index_[ptr->id.value] = idx;
  session_last_[ptr->session_id] = ptr->timestamp;
  next_id_ = std::max(next_id_, ptr->id.value + 1);
  records_.push_back(ptr);
  return ptr->id;
}

std::vector<RecordPtr> ActivitiesDB::filter_exact_upto(std::string_view object, std::size_t count) const {
  const auto key = normalize_label(object);
  std::vector<RecordPtr> out;
  std::shared_lock lock(mu_);
  auto it = object_index_.find(key);
  if (it == object_index_.end()) return out;
  for (std::size_t idx : it->second) {
    if (idx < count) out.push_back(records_[idx]);
  }
  lock.unlock();
  std::stable_sort(out.begin(), out.end(), [](const RecordPtr& a, const RecordPtr& b) {
    if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
    return a->id < b->id;
  });
  return out;
}

std::vector<RetrievalResult> ActivitiesDB::topk_upto(const EmbeddingVector& query, std::size_t k,
                                                     std::size_t count) const {
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
  if (query.dim() != dim_) {
    fail(ErrorCode::DimMismatch, "query has dim " + std::to_string(query.dim()) + ", diary dim is " +
                                     std::to_string(dim_));
  }
  std::vector<RetrievalResult> scored;
  {
    std::shared_lock lock(mu_);
    scored.reserve(count);
    for (std::size_t i = 0; i < count; ++i) scored.push_back({records_[i], cosine(query, records_[i]->embedding)});
  }
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    retrieval_before);
  scored.resize(keep);
  return scored;
}

RecordPtr ActivitiesDB::find_upto(RecordId id, std::size_t count) const {
  std::shared_lock lock(mu_);
  auto it = id_index_.find(id.value);
  if (it == id_index_.end() || it->second >= count) return nullptr;
  return records_[it->second];
}

std::vector<RecordPtr> ActivitiesDB::filter_exact(std::string_view object) const {
  return snapshot().filter_exact(object);
}

std::vector<RetrievalResult> ActivitiesDB::topk(const EmbeddingVector& query, std::size_t k) const {
  return snapshot().topk(query, k);
}

RecordPtr ActivitiesDB::find(RecordId id) const { return snapshot().find(id); }

std::vector<RecordPtr> ActivitiesDB::records() const {
  std::shared_lock lock(mu_);
  return records_;
}

std::vector<RecordPtr> ActivitiesDB::records_between(std::optional<Timestamp> since,
                                                     std::optional<Timestamp> until) const {
  std::vector<RecordPtr> out;
  std::shared_lock lock(mu_);
  for (const auto& r : records_) {
    if (since && r->timestamp < *since) continue;
    if (until && r->timestamp > *until) continue;
    out.push_back(r);
  }
  return out;
}

DiarySnapshot ActivitiesDB::snapshot() const {
  std::shared_lock lock(mu_);
  return DiarySnapshot(this, records_.size());
}

std::vector<std::string> ActivitiesDB::indexed_objects() const {
  std::vector<std::string> out;
  std::shared_lock lock(mu_);
  for (const auto& [k, v] : object_index_) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

void ActivitiesDB::write_jsonl(std::ostream& out) const {
  for (const auto& r : records()) out << record_to_json(*r).dump() << '\n';
}

std::string ActivitiesDB::export_jsonl() const {
  std::ostringstream os;
  write_jsonl(os);
  return os.str();
}

std::size_t ActivitiesDB::import_jsonl(std::istream& in) {
  std::size_t n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::InvalidArgument, "diary line " + std::to_string(line_no) + " is not JSON");
    insert(record_from_json(j));
    ++n;
  }
  return n;
}

void ActivitiesDB::attach_log(const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot read diary '" + path.string() + "'");
    import_jsonl(in);
  }
  std::unique_lock lock(mu_);
  log_.open(path, std::ios::app);
  if (!log_) fail(ErrorCode::Io, "cannot open diary '" + path.string() + "' for append");
}

}  // namespace mempal
