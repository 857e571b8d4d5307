#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "common/time.hpp"
#include "ingest/frame_batch.hpp"
#include "ingest/hand_detector.hpp"
#include "providers/mock.hpp"
#include "providers/providers.hpp"
#include "spatial/localizer.hpp"
#include "spatial/trajectory.hpp"
#include "store/activities_db.hpp"

namespace mempal {

struct StageTimings {
  Duration preprocess{0};
  Duration location{0};
  Duration vlm{0};
  Duration total{0};
};

// One processed batch, as kept for latency reporting.
struct StageTrace {
  std::string batch_id;
  StageTimings timings;
  bool vlm_called = false;
  bool record_inserted = false;
};

struct BatchOutcome {
  std::optional<ActivityRecord> record;
  LocationEstimate estimate;
  StageTimings timings;
  bool hands = false;
  std::optional<ErrorCode> skipped;  // set when a provider error dropped the record
  std::optional<ImageRef> tile;      // composite sent to the VLM, if any
};

struct IngestMetrics {
  std::uint64_t batches = 0;
  std::uint64_t gated = 0;
  std::uint64_t vlm_calls = 0;
  std::uint64_t records = 0;
  std::uint64_t skipped = 0;
};

struct IngestProviders {
  std::shared_ptr<ImageEmbedder> image_embedder;
  std::shared_ptr<TextEmbedder> text_embedder;
  std::shared_ptr<VisionLanguageModel> vlm;
  std::shared_ptr<HandDetector> hands;
};

struct IngestConfig {
  LocalizerConfig localizer;
  std::string vlm_prompt;  // empty = bundled prompt
  // Opaque camera preprocessing stage; spent on the pipeline clock.
  MockLatency preprocess_latency{0.0, 0.0};
  std::uint64_t seed = 0x70726570ULL;
};

// Frame batches -> location estimates and diary records. Batches of one
// session are processed serially; different sessions may run concurrently.
class IngestPipeline {
 public:
  IngestPipeline(IngestProviders providers, ActivitiesDB& db, std::shared_ptr<Clock> clock, IngestConfig config = {});

  // Throws OutOfOrderTimestamp when captured_at does not advance within the
  // session, TooManyFrames, InvalidArgument (no frames) and DimMismatch.
  // Provider failures skip the record but still return the estimate.
  BatchOutcome process_batch(const FrameBatch& batch, const RoomMap& map, std::string_view previous_activity);

  // process_batch with the session's most recent activity as context.
  BatchOutcome ingest(const FrameBatch& batch, const RoomMap& map);

  void set_trajectory(TrajectoryRecorder* recorder) { trajectory_ = recorder; }

  IngestMetrics metrics() const;
  std::vector<StageTrace> traces() const;
  std::string previous_activity(const std::string& session_id) const;

 private:
  struct Session {
    std::mutex mu;
    std::optional<Timestamp> last_captured;
    std::optional<LocationEstimate> last_estimate;
    std::string last_activity;
  };

  Session& session(const std::string& id);
  BatchOutcome run(Session& s, const FrameBatch& batch, const RoomMap& map, std::string_view previous_activity);

  IngestProviders providers_;
  ActivitiesDB& db_;
  std::shared_ptr<Clock> clock_;
  IngestConfig config_;
  std::string prompt_template_;
  TrajectoryRecorder* trajectory_ = nullptr;
  std::unique_ptr<LatencySimulator> preprocess_;

  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  IngestMetrics metrics_;
  std::vector<StageTrace> traces_;
};

}  // namespace mempal
