#include "engine/engine.hpp"

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common/log.hpp"
#include "common/text.hpp"
#include "providers/mock.hpp"
#include "providers/remote.hpp"
#include "query/templates.hpp"

namespace mempal {

namespace {

namespace fs = std::filesystem;

bool is_mock(const ProviderConfig& c) { return c.kind == ProviderConfig::Kind::Mock; }

Timestamp wall_now() {
  return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t salt) { return mix64(seed ^ mix64(salt)); }

}  // namespace

nlohmann::json frame_result_to_json(const FrameResult& r, const std::string& display_location) {
  nlohmann::json j = {{"batch_id", r.batch_id},
                      {"accepted", r.accepted},
                      {"hands", r.hands},
                      {"record_created", r.record_created},
                      {"record_id", r.record_id ? nlohmann::json(r.record_id->value) : nlohmann::json(nullptr)},
                      {"location", display_location},
                      {"confidence", r.location.confidence},
                      {"t", format_rfc3339(r.location.timestamp)}};
  j["skipped"] = r.skipped ? nlohmann::json(std::string(to_string(*r.skipped))) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json query_log_entry_to_json(const QueryLogEntry& e) {
  return {{"t", format_rfc3339(e.t)},
          {"session_id", e.session_id},
          {"transcript", e.transcript},
          {"answer", answer_to_json(e.answer)}};
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  if (config_.dim == 0) fail(ErrorCode::InvalidArgument, "dim must be positive");
  if (config_.virtual_time) {
    clock_ = std::make_shared<ManualClock>();
  } else {
    clock_ = std::make_shared<SteadyClock>();
  }
  const std::uint64_t seed = config_.seed;

  std::shared_ptr<TextEmbedder> text;
  if (is_mock(config_.text_embedder)) {
    text = std::make_shared<MockTextEmbedder>(config_.dim, kMockSeed, clock_, config_.text_embedder.latency);
  } else {
    text = std::make_shared<RemoteTextEmbedder>(config_.text_embedder, config_.dim, clock_);
  }
  std::shared_ptr<ImageEmbedder> image;
  if (is_mock(config_.image_embedder)) {
    image = std::make_shared<MockImageEmbedder>(config_.dim, kMockSeed, clock_, config_.image_embedder.latency);
  } else {
    image = std::make_shared<RemoteImageEmbedder>(config_.image_embedder, config_.dim, clock_);
  }
  std::shared_ptr<VisionLanguageModel> vlm;
  if (is_mock(config_.vlm)) {
    mock_vlm_ = std::make_shared<MockVisionLanguageModel>(clock_, config_.vlm.latency);
    vlm = mock_vlm_;
  } else {
    vlm = std::make_shared<RemoteVisionLanguageModel>(config_.vlm, clock_);
  }
  if (is_mock(config_.llm)) {
    llm_ = std::make_shared<MockLanguageModel>(clock_, config_.llm.latency);
  } else {
    llm_ = std::make_shared<RemoteLanguageModel>(config_.llm, clock_);
  }
  if (is_mock(config_.transcriber)) {
    transcriber_ = std::make_shared<MockTranscriber>();
  } else {
    transcriber_ = std::make_shared<RemoteTranscriber>(config_.transcriber, clock_);
  }
  hands_ = std::make_shared<MockHandDetector>();

  db_ = std::make_unique<ActivitiesDB>(config_.dim);

  if (!config_.data_dir.empty()) fs::create_directories(config_.data_dir);
  auto kind = config_.trajectory.kind;
  std::string target = config_.trajectory.target;
  if (kind == TrajectorySinkConfig::Kind::Memory && !config_.data_dir.empty()) kind = TrajectorySinkConfig::Kind::File;
  switch (kind) {
    case TrajectorySinkConfig::Kind::None: break;
    case TrajectorySinkConfig::Kind::Memory: sink_ = std::make_shared<MemoryTrajectorySink>(); break;
    case TrajectorySinkConfig::Kind::File:
      if (target.empty()) {
        if (config_.data_dir.empty()) fail(ErrorCode::InvalidArgument, "file trajectory sink needs a target or data_dir");
        target = (config_.data_dir / "trajectory.jsonl").string();
      }
      prior_rows_ = FileTrajectorySink::read_rows(target);
      sink_ = std::make_shared<FileTrajectorySink>(target);
      break;
    case TrajectorySinkConfig::Kind::Http:
      if (target.empty()) fail(ErrorCode::InvalidArgument, "http trajectory sink needs an endpoint");
      sink_ = std::make_shared<HttpTrajectorySink>(target);
      break;
  }
  if (sink_) trajectory_ = std::make_unique<TrajectoryRecorder>(sink_, config_.trajectory.async);

  IngestConfig ingest = config_.ingest;
  ingest.seed = sub_seed(seed, 1);
  pipeline_ = std::make_unique<IngestPipeline>(IngestProviders{image, text, vlm, hands_}, *db_, clock_, ingest);
  pipeline_->set_trajectory(trajectory_.get());

  queries_ = std::make_unique<QueryEngine>(text, llm_, clock_, config_.query);
  queries_->set_room_display([this](const std::string& label) { return display_room(label); });

  load_persisted();
}

Engine::~Engine() {
  try {
    flush();
  } catch (const std::exception& e) {
    log_warning(std::string("trajectory flush on shutdown failed: ") + e.what());
  }
}

void Engine::load_persisted() {
  if (config_.data_dir.empty()) return;
  const fs::path map_path = config_.data_dir / "room_map.json";
  if (fs::exists(map_path)) {
    std::ifstream in(map_path);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::Io, "room map file '" + map_path.string() + "' is corrupt");
    auto map = std::make_shared<const RoomMap>(room_map_from_json(j));
    std::unique_lock lock(map_mu_);
    map_ = std::move(map);
    if (j.contains("display_aliases")) aliases_ = j["display_aliases"].get<std::map<std::string, std::string>>();
  }
  db_->attach_log(config_.data_dir / "diary.jsonl");
  query_file_.open(config_.data_dir / "queries.jsonl", std::ios::app);
  if (!query_file_) fail(ErrorCode::Io, "cannot open query log in '" + config_.data_dir.string() + "'");
}

void Engine::persist_map() const {
  if (config_.data_dir.empty()) return;
  nlohmann::json j;
  {
    std::shared_lock lock(map_mu_);
    if (!map_) return;
    j = room_map_to_json(*map_);
    j["display_aliases"] = aliases_;
  }
  const fs::path path = config_.data_dir / "room_map.json";
  const fs::path tmp = config_.data_dir / "room_map.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

std::shared_ptr<const RoomMap> Engine::map_ptr() const {
  std::shared_lock lock(map_mu_);
  return map_;
}

void Engine::set_map(std::shared_ptr<const RoomMap> map) {
  {
    std::unique_lock lock(map_mu_);
    map_ = std::move(map);
    aliases_.clear();
  }
  persist_map();
}

CalibrationResult Engine::calibrate(const Walkthrough& walkthrough) {
  if (calibrating_.exchange(true)) fail(ErrorCode::CalibrationInProgress, "a calibration is already running");
  struct Reset {
    std::atomic<bool>& flag;
    ~Reset() { flag.store(false); }
  } reset{calibrating_};
  auto map = std::make_shared<const RoomMap>(build_room_map(segment_walkthrough(walkthrough.frames, walkthrough.labels)));
  if (map->dim() != config_.dim) {
    fail(ErrorCode::DimMismatch, "walkthrough dim " + std::to_string(map->dim()) + " != engine dim " +
                                     std::to_string(config_.dim));
  }
  CalibrationResult out{map->calibration_id(), map->labels()};
  set_map(std::move(map));
  return out;
}

void Engine::install_map(RoomMap map) {
  if (map.dim() != config_.dim) {
    fail(ErrorCode::DimMismatch, "room map dim " + std::to_string(map.dim()) + " != engine dim " +
                                     std::to_string(config_.dim));
  }
  set_map(std::make_shared<const RoomMap>(std::move(map)));
}

bool Engine::calibrated() const { return map_ptr() != nullptr; }

RoomMap Engine::room_map() const {
  auto m = map_ptr();
  if (!m) fail(ErrorCode::NotCalibrated, "no room map yet; run calibration first");
  return *m;
}

void Engine::rename_room(std::string_view old_label, std::string_view new_label) {
  {
    std::unique_lock lock(map_mu_);
    if (!map_) fail(ErrorCode::NotCalibrated, "no room map yet; run calibration first");
    const std::string from = normalize_label(old_label);
    const std::string to = normalize_label(new_label);
    // Old records stored under `to` show as another room now; reusing the
    // name would merge them with this one.
    if (auto it = aliases_.find(to); it != aliases_.end() && it->second != from) {
      fail(ErrorCode::InvalidArgument, "'" + to + "' names records of room '" + it->second + "'");
    }
    RoomMap next = *map_;
    next.rename(from, to);
    for (auto& [stored, shown] : aliases_) {
      if (shown == from) shown = to;
    }
    if (!aliases_.count(from)) aliases_[from] = to;
    map_ = std::make_shared<const RoomMap>(std::move(next));
  }
  persist_map();
}

std::string Engine::display_room(const std::string& stored_label) const {
  std::shared_lock lock(map_mu_);
  auto it = aliases_.find(stored_label);
  return it == aliases_.end() ? stored_label : it->second;
}

FrameResult Engine::ingest(const FrameBatch& batch) {
  auto map = map_ptr();
  if (!map) fail(ErrorCode::NotCalibrated, "frames arrived before calibration");
  if (mock_vlm_ && batch.vlm_reply) mock_vlm_->script(batch.batch_id, *batch.vlm_reply);
  const BatchOutcome out = pipeline_->ingest(batch, *map);
  if (out.tile && config_.retain_images) retain(batch.batch_id, *out.tile);
  FrameResult r;
  r.batch_id = batch.batch_id;
  r.hands = out.hands;
  r.record_created = out.record.has_value();
  if (out.record) r.record_id = out.record->id;
  r.location = out.estimate;
  r.skipped = out.skipped;
  return r;
}

void Engine::retain(const std::string& batch_id, const ImageRef& tile) {
  std::lock_guard lock(images_mu_);
  images_.emplace_back(batch_id, tile);
  while (images_.size() > config_.image_capacity) images_.pop_front();
}

Engine::SessionSlot& Engine::session_slot(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  auto& slot = sessions_[id];
  if (!slot) slot = std::make_unique<SessionSlot>(id, config_.session_turns);
  return *slot;
}

Answer Engine::query(const std::string& session_id, std::string_view transcript, std::optional<Timestamp> now) {
  if (!calibrated()) fail(ErrorCode::NotCalibrated, "queries need a calibrated home");
  if (trim(transcript).empty()) fail(ErrorCode::EmptyText, "empty transcript");
  const std::string sid = trim(session_id).empty() ? std::string("default") : std::string(session_id);
  const Timestamp t = now.value_or(wall_now());
  SessionSlot& slot = session_slot(sid);
  Answer a;
  {
    std::lock_guard lock(slot.mu);
    if (config_.require_wakeword && !has_wakeword(transcript)) {
      const Duration started = clock_->now();
      a.text = std::string(kNotSureAnswer);
      a.path = AnswerPath::NotFound;
      a.intent.raw_text = std::string(transcript);
      a.intent.wakeword_present = false;
      a.latency = clock_->now() - started;
    } else {
      a = queries_->ask(transcript, db_->snapshot(), slot.session, t);
    }
  }
  QueryLogEntry entry{t, sid, std::string(transcript), a};
  std::lock_guard lock(log_mu_);
  if (query_file_.is_open()) {
    query_file_ << query_log_entry_to_json(entry).dump() << "\n";
    query_file_.flush();
  }
  query_log_.push_back(std::move(entry));
  return a;
}

Answer Engine::query_audio(const std::string& session_id, const AudioRef& audio, std::optional<Timestamp> now) {
  return query(session_id, transcriber_->transcribe(audio), now);
}

std::vector<Turn> Engine::session_turns(const std::string& session_id) const {
  SessionSlot* slot = nullptr;
  {
    std::lock_guard lock(sessions_mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return {};
    slot = it->second.get();
  }
  std::lock_guard lock(slot->mu);
  return {slot->session.turns().begin(), slot->session.turns().end()};
}

std::vector<RecordPtr> Engine::activities(std::optional<Timestamp> since, std::optional<Timestamp> until) const {
  if (since && until && *since > *until) fail(ErrorCode::BadTimeRange, "since is after until");
  return db_->records_between(since, until);
}

nlohmann::json Engine::activity_json(const ActivityRecord& r) const {
  nlohmann::json j = record_to_json(r);
  const std::string shown = display_room(r.location);
  if (shown != r.location) {
    j["recorded_location"] = r.location;
    j["location"] = shown;
  }
  return j;
}

std::vector<TrajectoryRow> Engine::trajectory() const {
  std::vector<TrajectoryRow> rows = prior_rows_;
  if (trajectory_) {
    const auto live = trajectory_->rows();
    rows.insert(rows.end(), live.begin(), live.end());
  }
  for (auto& r : rows) r.room = display_room(r.room);
  return rows;
}

std::string Engine::export_jsonl() const { return db_->export_jsonl(); }

std::size_t Engine::import_jsonl(std::istream& in) { return db_->import_jsonl(in); }

VisualAid Engine::visual_aid(std::string_view object) const {
  if (!config_.retain_images) fail(ErrorCode::ImageNotRetained, "image retention is off (text-only mode)");
  const std::string name = normalize_object_phrase(object);
  const auto exact = db_->filter_exact(name);
  if (exact.empty()) fail(ErrorCode::NoSighting, "'" + name + "' was never seen");
  const RecordPtr& r = exact.back();
  std::lock_guard lock(images_mu_);
  for (auto it = images_.rbegin(); it != images_.rend(); ++it) {
    if (it->first == r->source_batch) {
      return VisualAid{name, it->second, name, r->timestamp, r->id, display_room(r->location)};
    }
  }
  fail(ErrorCode::ImageNotRetained, "the image of batch '" + r->source_batch + "' is no longer retained");
}

IngestMetrics Engine::ingest_metrics() const { return pipeline_->metrics(); }

std::vector<StageTrace> Engine::stage_traces() const { return pipeline_->traces(); }

std::vector<double> Engine::query_latencies() const {
  std::lock_guard lock(log_mu_);
  std::vector<double> out;
  out.reserve(query_log_.size());
  for (const auto& e : query_log_) out.push_back(to_seconds(e.answer.latency));
  return out;
}

std::vector<QueryLogEntry> Engine::query_log() const {
  std::lock_guard lock(log_mu_);
  return query_log_;
}

LatencyReport Engine::latency() const {
  const auto q = query_latencies();
  return latency_report(stage_traces(), q);
}

std::size_t Engine::vlm_provider_calls() const {
  return mock_vlm_ ? mock_vlm_->call_count() : pipeline_->metrics().vlm_calls;
}

void Engine::flush() {
  if (!trajectory_) return;
  trajectory_->close_runs();
  trajectory_->drain();
}

}  // namespace mempal
