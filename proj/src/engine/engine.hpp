#pragma once

#include <atomic>
#include <deque>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "engine/config.hpp"
#include "eval/latency.hpp"
#include "ingest/pipeline.hpp"
#include "query/engine.hpp"
#include "spatial/calibration.hpp"
#include "spatial/trajectory.hpp"

namespace mempal {

struct CalibrationResult {
  std::string calibration_id;
  std::vector<std::string> rooms;
};

struct FrameResult {
  std::string batch_id;
  bool accepted = true;
  bool hands = false;
  bool record_created = false;
  std::optional<RecordId> record_id;
  LocationEstimate location;
  std::optional<ErrorCode> skipped;
};
nlohmann::json frame_result_to_json(const FrameResult& r, const std::string& display_location);

struct VisualAid {
  std::string object;
  ImageRef tiled_image;
  std::string detected_label;
  Timestamp timestamp;
  RecordId record_id;
  std::string location;
};

struct QueryLogEntry {
  Timestamp t;
  std::string session_id;
  std::string transcript;
  Answer answer;
};
nlohmann::json query_log_entry_to_json(const QueryLogEntry& e);

// The full MemPal engine: room map, diary, ingest pipeline, query engine,
// chat sessions and the trajectory recorder behind one thread-safe object.
// With a data_dir the map, diary, query log and (file sink) trajectory are
// persisted there and reloaded on construction.
class Engine {
 public:
  explicit Engine(EngineConfig config);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const EngineConfig& config() const { return config_; }
  std::shared_ptr<Clock> clock() const { return clock_; }

  // Builds and installs a room map from a walkthrough. Throws NoLabels,
  // LabelsOutOfOrder, CalibrationInProgress (another calibration running).
  CalibrationResult calibrate(const Walkthrough& walkthrough);
  void install_map(RoomMap map);
  bool calibrated() const;
  // Throws NotCalibrated.
  RoomMap room_map() const;
  // Renames a room in the map. Records keep their stored label; answers and
  // listings show the new name.
  void rename_room(std::string_view old_label, std::string_view new_label);
  std::string display_room(const std::string& stored_label) const;

  // Throws NotCalibrated, OutOfOrderTimestamp, TooManyFrames, InvalidArgument.
  FrameResult ingest(const FrameBatch& batch);

  // `now` defaults to the wall clock. Throws NotCalibrated.
  Answer query(const std::string& session_id, std::string_view transcript,
               std::optional<Timestamp> now = std::nullopt);
  Answer query_audio(const std::string& session_id, const AudioRef& audio, std::optional<Timestamp> now = std::nullopt);
  // Turns of a session (empty when unknown).
  std::vector<Turn> session_turns(const std::string& session_id) const;

  // Throws BadTimeRange when since > until.
  std::vector<RecordPtr> activities(std::optional<Timestamp> since = std::nullopt,
                                    std::optional<Timestamp> until = std::nullopt) const;
  nlohmann::json activity_json(const ActivityRecord& r) const;
  std::vector<TrajectoryRow> trajectory() const;
  std::string export_jsonl() const;
  // Appends every record of a diary stream; returns the count.
  std::size_t import_jsonl(std::istream& in);

  // Throws ImageNotRetained (privacy mode, or the image was evicted) and
  // NoSighting.
  VisualAid visual_aid(std::string_view object) const;

  const ActivitiesDB& diary() const { return *db_; }
  IngestMetrics ingest_metrics() const;
  std::vector<StageTrace> stage_traces() const;
  std::vector<double> query_latencies() const;
  std::vector<QueryLogEntry> query_log() const;
  // Throws NoData before anything was timed.
  LatencyReport latency() const;
  // Calls the vision-language model actually received.
  std::size_t vlm_provider_calls() const;
  // Flushes the trajectory (closes open runs).
  void flush();

 private:
  struct SessionSlot {
    std::mutex mu;
    ChatSession session;
    explicit SessionSlot(std::string id, std::size_t turns) : session(std::move(id), turns) {}
  };
  std::shared_ptr<const RoomMap> map_ptr() const;
  void set_map(std::shared_ptr<const RoomMap> map);
  void persist_map() const;
  void load_persisted();
  SessionSlot& session_slot(const std::string& id);
  void retain(const std::string& batch_id, const ImageRef& tile);

  EngineConfig config_;
  std::shared_ptr<Clock> clock_;
  std::unique_ptr<ActivitiesDB> db_;
  std::shared_ptr<MockVisionLanguageModel> mock_vlm_;
  std::shared_ptr<MockHandDetector> hands_;
  std::shared_ptr<LanguageModel> llm_;
  std::shared_ptr<Transcriber> transcriber_;
  std::shared_ptr<TrajectorySink> sink_;
  std::unique_ptr<TrajectoryRecorder> trajectory_;
  // rows a file sink already held when the engine started
  std::vector<TrajectoryRow> prior_rows_;
  std::unique_ptr<IngestPipeline> pipeline_;
  std::unique_ptr<QueryEngine> queries_;

  mutable std::shared_mutex map_mu_;
  std::shared_ptr<const RoomMap> map_;
  // stored label -> label shown, after renames
  std::map<std::string, std::string> aliases_;
  std::atomic<bool> calibrating_{false};

  mutable std::mutex sessions_mu_;
  std::map<std::string, std::unique_ptr<SessionSlot>> sessions_;

  mutable std::mutex log_mu_;
  std::vector<QueryLogEntry> query_log_;
  std::ofstream query_file_;

  mutable std::mutex images_mu_;
  std::deque<std::pair<std::string, ImageRef>> images_;
};

}  // namespace mempal
