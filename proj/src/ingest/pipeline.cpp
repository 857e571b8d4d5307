#include "ingest/pipeline.hpp"

#include "common/log.hpp"
#include "common/text.hpp"
#include "ingest/tiling.hpp"
#include "providers/prompts.hpp"

namespace mempal {

namespace {

bool is_provider_fault(ErrorCode c) {
  return c == ErrorCode::ProviderUnavailable || c == ErrorCode::MalformedProviderOutput;
}

}  // namespace

IngestPipeline::IngestPipeline(IngestProviders providers, ActivitiesDB& db, std::shared_ptr<Clock> clock,
                               IngestConfig config)
    : providers_(std::move(providers)), db_(db), clock_(std::move(clock)), config_(std::move(config)) {
  if (!providers_.image_embedder || !providers_.text_embedder || !providers_.vlm || !providers_.hands) {
    fail(ErrorCode::InvalidArgument, "ingest pipeline needs every provider");
  }
  if (!clock_) clock_ = std::make_shared<SteadyClock>();
  if (providers_.text_embedder->dim() != db_.dim()) {
    fail(ErrorCode::DimMismatch, "text embedder dim " + std::to_string(providers_.text_embedder->dim()) +
                                     " != diary dim " + std::to_string(db_.dim()));
  }
  prompt_template_ = config_.vlm_prompt.empty() ? std::string(default_vlm_prompt()) : config_.vlm_prompt;
  preprocess_ = std::make_unique<LatencySimulator>(clock_, config_.preprocess_latency, config_.seed);
}

IngestPipeline::Session& IngestPipeline::session(const std::string& id) {
  std::lock_guard lock(mu_);
  auto& slot = sessions_[id];
  if (!slot) slot = std::make_unique<Session>();
  return *slot;
}

BatchOutcome IngestPipeline::process_batch(const FrameBatch& batch, const RoomMap& map,
                                           std::string_view previous_activity) {
  Session& s = session(batch.session_id);
  std::lock_guard lock(s.mu);
  return run(s, batch, map, previous_activity);
}

BatchOutcome IngestPipeline::ingest(const FrameBatch& batch, const RoomMap& map) {
  Session& s = session(batch.session_id);
  std::lock_guard lock(s.mu);
  const std::string prev = s.last_activity;
  return run(s, batch, map, prev);
}

BatchOutcome IngestPipeline::run(Session& s, const FrameBatch& batch, const RoomMap& map,
                                 std::string_view previous_activity) {
  if (batch.frames.empty()) fail(ErrorCode::InvalidArgument, "batch '" + batch.batch_id + "' has no frames");
  if (batch.frames.size() > kMaxTiledFrames) {
    fail(ErrorCode::TooManyFrames, "batch '" + batch.batch_id + "' has " + std::to_string(batch.frames.size()) +
                                       " frames");
  }
  if (s.last_captured && batch.captured_at <= *s.last_captured) {
    fail(ErrorCode::OutOfOrderTimestamp, "batch '" + batch.batch_id + "' at " + format_rfc3339(batch.captured_at) +
                                             " does not advance session '" + batch.session_id + "'");
  }

  BatchOutcome out;
  const Duration t0 = clock_->now();
  preprocess_->spend();
  const Duration t1 = clock_->now();
  out.timings.preprocess = t1 - t0;

  bool located = true;
  try {
    const EmbeddingVector frame_emb = providers_.image_embedder->embed_image(batch.frames.front());
    out.estimate = localize(frame_emb, map, s.last_estimate, batch.captured_at, config_.localizer);
  } catch (const Error& e) {
    if (!is_provider_fault(e.code())) throw;
    log_warning("image embedding failed for batch '" + batch.batch_id + "': " + e.what());
    out.estimate = LocationEstimate{std::string(kUnknownRoom), 0.0, batch.captured_at};
    located = false;
  }
  const Duration t2 = clock_->now();
  out.timings.location = t2 - t1;

  s.last_captured = batch.captured_at;
  if (located) s.last_estimate = out.estimate;
  if (trajectory_) trajectory_->append(out.estimate, batch.session_id);

  out.hands = gate_batch(batch, *providers_.hands);
  bool vlm_called = false;
  if (out.hands) {
    const Duration t3 = clock_->now();
    std::optional<VlmDescription> desc;
    try {
      out.tile = tile_frames(batch.frames);
      vlm_called = true;
      desc = providers_.vlm->describe(*out.tile, previous_activity,
                                      render_vlm_prompt(prompt_template_, previous_activity));
    } catch (const Error& e) {
      if (!is_provider_fault(e.code())) throw;
      log_warning("VLM failed for batch '" + batch.batch_id + "': " + e.what() + "; record skipped");
      out.skipped = e.code();
    }
    out.timings.vlm = clock_->now() - t3;

    if (desc) {
      ActivityRecord rec;
      rec.session_id = batch.session_id;
      rec.timestamp = batch.captured_at;
      rec.location = out.estimate.room_label;
      rec.activity = desc->activity;
      rec.objects_in_hand = normalize_object_list(desc->objects_in_hand);
      rec.background = desc->background;
      rec.source_batch = batch.batch_id;
      try {
        rec.embedding = providers_.text_embedder->embed_text(
            compose_record_text(rec.activity, rec.objects_in_hand, rec.location, rec.background));
        rec.id = db_.insert(rec);
        s.last_activity = rec.activity;
        out.record = std::move(rec);
      } catch (const Error& e) {
        if (!is_provider_fault(e.code())) throw;
        log_warning("text embedding failed for batch '" + batch.batch_id + "': " + e.what() + "; record skipped");
        out.skipped = e.code();
      }
    }
  }
  out.timings.total = clock_->now() - t0;

  std::lock_guard lock(mu_);
  ++metrics_.batches;
  if (out.hands) ++metrics_.gated;
  if (vlm_called) ++metrics_.vlm_calls;
  if (out.record) ++metrics_.records;
  if (out.skipped) ++metrics_.skipped;
  traces_.push_back(StageTrace{batch.batch_id, out.timings, vlm_called, out.record.has_value()});
  return out;
}

IngestMetrics IngestPipeline::metrics() const {
  std::lock_guard lock(mu_);
  return metrics_;
}

std::vector<StageTrace> IngestPipeline::traces() const {
  std::lock_guard lock(mu_);
  return traces_;
}

std::string IngestPipeline::previous_activity(const std::string& session_id) const {
  Session* s = nullptr;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return {};
    s = it->second.get();
  }
  std::lock_guard slock(s->mu);
  return s->last_activity;
}

}  // namespace mempal
