#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <set>
#include <string>

#include "ingest/frame_batch.hpp"

namespace mempal {

// Reports whether the wearer's hands are visible in any frame of a batch.
// Implementations may throw; the gate treats a failure as "no hands".
class HandDetector {
 public:
  virtual ~HandDetector() = default;
  virtual bool hands_present(const FrameBatch& batch) = 0;
};

// Reads the scripted `hands` flag of the batch. Batches without a flag, or
// listed via fail_on(), raise ProviderUnavailable.
class MockHandDetector final : public HandDetector {
 public:
  bool hands_present(const FrameBatch& batch) override;
  void fail_on(const std::string& batch_id);

 private:
  std::mutex mu_;
  std::set<std::string> failing_;
};

// Detector failure -> false, with a warning logged.
bool gate_batch(const FrameBatch& batch, HandDetector& detector);

}  // namespace mempal
