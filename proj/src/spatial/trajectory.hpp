#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spatial/localizer.hpp"

namespace mempal {

// One run-length-collapsed stay in a room.
struct TrajectoryRow {
  std::string session_id;
  std::string room;
  Timestamp start;
  Timestamp end;
  std::size_t estimates = 0;

  friend bool operator==(const TrajectoryRow&, const TrajectoryRow&) = default;
};

nlohmann::json trajectory_row_to_json(const TrajectoryRow& row);
TrajectoryRow trajectory_row_from_json(const nlohmann::json& j);

// Append-only destination for completed trajectory rows. append_row throws
// Error{SinkUnavailable} when the row could not be stored.
class TrajectorySink {
 public:
  virtual ~TrajectorySink() = default;
  virtual void append_row(const TrajectoryRow& row) = 0;
};

// In-memory sink with a switch for fault-injection tests.
class MemoryTrajectorySink final : public TrajectorySink {
 public:
  void append_row(const TrajectoryRow& row) override;
  void set_online(bool online);
  std::vector<TrajectoryRow> rows() const;

 private:
  mutable std::mutex mu_;
  bool online_ = true;
  std::vector<TrajectoryRow> rows_;
};

// JSON Lines file, one row per line.
class FileTrajectorySink final : public TrajectorySink {
 public:
  explicit FileTrajectorySink(std::filesystem::path path);
  void append_row(const TrajectoryRow& row) override;
  const std::filesystem::path& path() const { return path_; }
  static std::vector<TrajectoryRow> read_rows(const std::filesystem::path& path);

 private:
  std::mutex mu_;
  std::filesystem::path path_;
};

// POSTs each row as JSON to a remote appender (e.g. a caregiver backend).
class HttpTrajectorySink final : public TrajectorySink {
 public:
  HttpTrajectorySink(std::string endpoint, std::chrono::milliseconds timeout = std::chrono::milliseconds{2000});
  void append_row(const TrajectoryRow& row) override;

 private:
  std::string origin_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

// Collapses consecutive same-room estimates per session into rows and feeds
// completed rows to a sink through an ordered buffer. append() never blocks
// on the sink: failed writes stay buffered and are retried in order, either
// by the background worker (async mode) or on the next append()/drain().
class TrajectoryRecorder {
 public:
  explicit TrajectoryRecorder(std::shared_ptr<TrajectorySink> sink, bool async = false,
                              std::chrono::milliseconds retry_interval = std::chrono::milliseconds{200});
  ~TrajectoryRecorder();
  TrajectoryRecorder(const TrajectoryRecorder&) = delete;
  TrajectoryRecorder& operator=(const TrajectoryRecorder&) = delete;

  // Throws InvalidArgument if the estimate is older than the session's
  // previous one.
  void append(const LocationEstimate& estimate, const std::string& session_id = "default");

  // Closes every open run and queues it for the sink.
  void close_runs();

  // Tries to deliver buffered rows now; true when nothing is left pending.
  bool drain();
  bool wait_drained(std::chrono::milliseconds timeout);

  std::size_t pending() const;
  // Delivered, pending and open rows, in order.
  std::vector<TrajectoryRow> rows() const;

 private:
  bool drain_locked(std::unique_lock<std::mutex>& lock);
  void worker();

  std::shared_ptr<TrajectorySink> sink_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<TrajectoryRow> delivered_;
  std::deque<TrajectoryRow> pending_;
  std::map<std::string, TrajectoryRow> open_;
  bool writing_ = false;
  bool stop_ = false;
  std::chrono::milliseconds retry_interval_;
  std::thread worker_;
};

}  // namespace mempal
