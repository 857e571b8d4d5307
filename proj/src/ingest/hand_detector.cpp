#include "ingest/hand_detector.hpp"

#include "common/error.hpp"
#include "common/log.hpp"

namespace mempal {

bool MockHandDetector::hands_present(const FrameBatch& batch) {
  {
    std::lock_guard lock(mu_);
    if (failing_.count(batch.batch_id)) fail(ErrorCode::ProviderUnavailable, "hand detector fault injected");
  }
  if (!batch.hands) fail(ErrorCode::ProviderUnavailable, "no scripted hand state for batch '" + batch.batch_id + "'");
  return *batch.hands;
}

void MockHandDetector::fail_on(const std::string& batch_id) {
  std::lock_guard lock(mu_);
  failing_.insert(batch_id);
}

bool gate_batch(const FrameBatch& batch, HandDetector& detector) {
  try {
    return detector.hands_present(batch);
  } catch (const std::exception& e) {
    log_warning("hand detector failed on batch '" + batch.batch_id + "': " + e.what() + "; treating as no hands");
    return false;
  }
}

}  // namespace mempal
