#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/time.hpp"
#include "providers/providers.hpp"

namespace mempal {

inline constexpr std::uint64_t kMockSeed = 0x6d656d70616cULL;
inline constexpr std::size_t kDefaultDim = 64;

// Spends mock latency on a clock. Thread-safe.
class LatencySimulator {
 public:
  LatencySimulator(std::shared_ptr<Clock> clock, MockLatency latency, std::uint64_t seed);
  void spend();

 private:
  std::shared_ptr<Clock> clock_;
  MockLatency latency_;
  std::mutex mu_;
  Rng rng_;
};

// Deterministic text embedder: every content word of the text (after
// stopword removal and a small alias lexicon, e.g. "spectacles" -> glasses)
// is hashed to a seeded Gaussian direction; the sum is L2-normalized.
// Texts sharing vocabulary therefore land close together, distinct object
// names land far apart, and the same text always maps to the same vector.
class MockTextEmbedder final : public TextEmbedder {
 public:
  explicit MockTextEmbedder(std::size_t dim = kDefaultDim, std::uint64_t seed = kMockSeed,
                            std::shared_ptr<Clock> clock = nullptr, MockLatency latency = {});

  EmbeddingVector embed_text(std::string_view text) override;
  std::size_t dim() const override { return dim_; }

  // The canonical feature list a text is embedded from.
  static std::vector<std::string> features(std::string_view text);

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::unique_ptr<LatencySimulator> latency_;
};

// Returns the frame's attached embedding when present; otherwise hashes the
// pixels (or the frame id) to a unit vector.
class MockImageEmbedder final : public ImageEmbedder {
 public:
  explicit MockImageEmbedder(std::size_t dim = kDefaultDim, std::uint64_t seed = kMockSeed,
                             std::shared_ptr<Clock> clock = nullptr, MockLatency latency = {});

  EmbeddingVector embed_image(const ImageRef& frame) override;
  std::size_t dim() const override { return dim_; }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::unique_ptr<LatencySimulator> latency_;
};

// Replays scripted raw replies keyed by the batch id carried in the tiled
// image's tag. Replies pass through parse_vlm_reply like remote output.
class MockVisionLanguageModel final : public VisionLanguageModel {
 public:
  explicit MockVisionLanguageModel(std::shared_ptr<Clock> clock = nullptr, MockLatency latency = {});

  void script(const std::string& batch_id, std::string raw_reply);
  void fail_with(const std::string& batch_id, ErrorCode code);

  VlmDescription describe(const ImageRef& tiled_image, std::string_view previous_activity,
                          std::string_view prompt) override;

  std::size_t call_count() const { return calls_.load(); }
  std::vector<std::string> call_log() const;
  // previous_activity argument of every call, in call order.
  std::vector<std::string> context_log() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> replies_;
  std::map<std::string, ErrorCode> failures_;
  std::vector<std::string> log_;
  std::vector<std::string> contexts_;
  std::atomic<std::size_t> calls_{0};
  std::unique_ptr<LatencySimulator> latency_;
};

// Template-driven stand-in for the answer-composing language model. Context
// docs use the layout "time | location | objects | background | activity".
// The reply is composed from the first doc mentioning a content word of the
// question, or is "I'm not sure" when no doc does.
class MockLanguageModel final : public LanguageModel {
 public:
  explicit MockLanguageModel(std::shared_ptr<Clock> clock = nullptr, MockLatency latency = {});

  std::string complete(std::string_view prompt, std::span<const std::string> context_docs) override;

  void fail_next(std::size_t n) { fail_next_.store(n); }
  std::size_t call_count() const { return calls_.load(); }

 private:
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> fail_next_{0};
  std::unique_ptr<LatencySimulator> latency_;
};

class MockTranscriber final : public Transcriber {
 public:
  std::string transcribe(const AudioRef& audio) override;
};

}  // namespace mempal
