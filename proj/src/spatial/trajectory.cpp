#include "spatial/trajectory.hpp"

#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"
#include "providers/remote.hpp"

namespace mempal {

nlohmann::json trajectory_row_to_json(const TrajectoryRow& row) {
  return {{"schema", 1},
          {"session_id", row.session_id},
          {"room", row.room},
          {"start", format_rfc3339(row.start)},
          {"end", format_rfc3339(row.end)},
          {"estimates", row.estimates}};
}

TrajectoryRow trajectory_row_from_json(const nlohmann::json& j) {
  try {
    return TrajectoryRow{j.value("session_id", std::string("default")), j.at("room").get<std::string>(),
                         timestamp_from_json(j.at("start")), timestamp_from_json(j.at("end")),
                         j.value("estimates", std::size_t{1})};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed trajectory row: ") + e.what());
  }
}

void MemoryTrajectorySink::append_row(const TrajectoryRow& row) {
  std::lock_guard lock(mu_);
  if (!online_) fail(ErrorCode::SinkUnavailable, "memory sink offline");
  rows_.push_back(row);
}

void MemoryTrajectorySink::set_online(bool online) {
  std::lock_guard lock(mu_);
  online_ = online;
}

std::vector<TrajectoryRow> MemoryTrajectorySink::rows() const {
  std::lock_guard lock(mu_);
  return rows_;
}

FileTrajectorySink::FileTrajectorySink(std::filesystem::path path) : path_(std::move(path)) {}

void FileTrajectorySink::append_row(const TrajectoryRow& row) {
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app);
  if (!out) fail(ErrorCode::SinkUnavailable, "cannot open trajectory file '" + path_.string() + "'");
  out << trajectory_row_to_json(row).dump() << '\n';
  out.flush();
  if (!out) fail(ErrorCode::SinkUnavailable, "failed writing trajectory file '" + path_.string() + "'");
}

std::vector<TrajectoryRow> FileTrajectorySink::read_rows(const std::filesystem::path& path) {
  std::vector<TrajectoryRow> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(trajectory_row_from_json(nlohmann::json::parse(line)));
  }
  return rows;
}

HttpTrajectorySink::HttpTrajectorySink(std::string endpoint, std::chrono::milliseconds timeout) : timeout_(timeout) {
  std::tie(origin_, path_) = split_endpoint(endpoint);
}

void HttpTrajectorySink::append_row(const TrajectoryRow& row) {
  httplib::Client cli(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  auto res = cli.Post(path_, trajectory_row_to_json(row).dump(), "application/json");
  if (!res) fail(ErrorCode::SinkUnavailable, "trajectory endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    fail(ErrorCode::SinkUnavailable, "trajectory endpoint returned HTTP " + std::to_string(res->status));
  }
}

TrajectoryRecorder::TrajectoryRecorder(std::shared_ptr<TrajectorySink> sink, bool async,
                                       std::chrono::milliseconds retry_interval)
    : sink_(std::move(sink)), retry_interval_(retry_interval) {
  if (!sink_) fail(ErrorCode::InvalidArgument, "trajectory recorder needs a sink");
  if (async) worker_ = std::thread([this] { worker(); });
}

TrajectoryRecorder::~TrajectoryRecorder() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
  std::unique_lock lock(mu_);
  drain_locked(lock);
}

void TrajectoryRecorder::append(const LocationEstimate& estimate, const std::string& session_id) {
  std::unique_lock lock(mu_);
  auto it = open_.find(session_id);
  if (it != open_.end() && estimate.timestamp < it->second.end) {
    fail(ErrorCode::InvalidArgument, "trajectory estimates must arrive in timestamp order");
  }
  if (it != open_.end() && it->second.room == estimate.room_label) {
    it->second.end = estimate.timestamp;
    ++it->second.estimates;
    return;
  }
  if (it != open_.end()) {
    pending_.push_back(it->second);
    open_.erase(it);
  }
  open_.emplace(session_id, TrajectoryRow{session_id, estimate.room_label, estimate.timestamp, estimate.timestamp, 1});
  if (worker_.joinable()) {
    cv_.notify_all();
  } else {
    drain_locked(lock);
  }
}

void TrajectoryRecorder::close_runs() {
  std::unique_lock lock(mu_);
  for (auto& [session, row] : open_) pending_.push_back(row);
  open_.clear();
  if (worker_.joinable()) {
    cv_.notify_all();
  } else {
    drain_locked(lock);
  }
}

bool TrajectoryRecorder::drain_locked(std::unique_lock<std::mutex>& lock) {
  // One writer at a time keeps rows in order; the sink call runs unlocked so
  // append() never waits on sink I/O.
  if (writing_) return pending_.empty();
  writing_ = true;
  while (!pending_.empty()) {
    const TrajectoryRow row = pending_.front();
    lock.unlock();
    bool ok = true;
    try {
      sink_->append_row(row);
    } catch (const Error&) {
      ok = false;
    }
    lock.lock();
    if (!ok) break;
    pending_.pop_front();
    delivered_.push_back(row);
  }
  writing_ = false;
  cv_.notify_all();
  return pending_.empty();
}

bool TrajectoryRecorder::drain() {
  std::unique_lock lock(mu_);
  return drain_locked(lock);
}

bool TrajectoryRecorder::wait_drained(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::unique_lock lock(mu_);
  while (!pending_.empty()) {
    if (!worker_.joinable()) {
      if (drain_locked(lock)) break;
    }
    const auto wake = std::min(deadline, std::chrono::steady_clock::now() + retry_interval_);
    cv_.wait_until(lock, wake);
    if (std::chrono::steady_clock::now() >= deadline) return pending_.empty();
  }
  return true;
}

std::size_t TrajectoryRecorder::pending() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

std::vector<TrajectoryRow> TrajectoryRecorder::rows() const {
  std::lock_guard lock(mu_);
  std::vector<TrajectoryRow> out = delivered_;
  out.insert(out.end(), pending_.begin(), pending_.end());
  for (const auto& [session, row] : open_) out.push_back(row);
  return out;
}

void TrajectoryRecorder::worker() {
  std::unique_lock lock(mu_);
  while (!stop_) {
    if (!pending_.empty()) {
      if (!drain_locked(lock)) {
        cv_.wait_for(lock, retry_interval_, [this] { return stop_; });
        continue;
      }
    }
    cv_.wait(lock, [this] { return stop_ || !pending_.empty(); });
  }
}

}  // namespace mempal
