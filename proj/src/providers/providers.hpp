#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "providers/embedding.hpp"
#include "providers/image.hpp"

namespace mempal {

struct VlmDescription {
  std::string activity;
  std::vector<std::string> objects_in_hand;  // lowercase, trimmed, deduplicated
  std::string background;

  friend bool operator==(const VlmDescription&, const VlmDescription&) = default;
};

// Structural validation of a vision-language reply. Accepts a JSON object
// {activity, objects | objects_in_hand, background}; anything else throws
// Error{MalformedProviderOutput}. Object names come back normalized.
VlmDescription parse_vlm_reply(std::string_view raw);

struct AudioRef {
  std::optional<std::string> transcript;
  std::string bytes;
};

// Artificial per-call latency for mock providers, drawn log-normally with the
// given mean and standard deviation (seconds) and spent on the engine clock.
struct MockLatency {
  double mean_s = 0.0;
  double sd_s = 0.0;
};

struct ProviderConfig {
  enum class Kind { Mock, RemoteHttp };

  Kind kind = Kind::Mock;
  std::optional<std::string> endpoint;
  std::chrono::milliseconds timeout{10000};
  int retry_budget = 2;
  std::chrono::milliseconds backoff_base{100};
  MockLatency latency;

  // Throws Error{InvalidArgument} when remote-http lacks an endpoint or the
  // timeout is not positive.
  void validate() const;
};

ProviderConfig provider_config_from_json(const nlohmann::json& j);
nlohmann::json to_json_value(const ProviderConfig& c);

class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  // Throws EmptyText when text is blank, ProviderUnavailable after retries.
  virtual EmbeddingVector embed_text(std::string_view text) = 0;
  virtual std::size_t dim() const = 0;
};

// Frame embeddings for localization (CLIP-style in a real deployment).
class ImageEmbedder {
 public:
  virtual ~ImageEmbedder() = default;
  virtual EmbeddingVector embed_image(const ImageRef& frame) = 0;
  virtual std::size_t dim() const = 0;
};

class VisionLanguageModel {
 public:
  virtual ~VisionLanguageModel() = default;
  virtual VlmDescription describe(const ImageRef& tiled_image, std::string_view previous_activity,
                                  std::string_view prompt) = 0;
};

class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual std::string complete(std::string_view prompt, std::span<const std::string> context_docs) = 0;
};

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual std::string transcribe(const AudioRef& audio) = 0;
};

// Answer the language model gives when the context holds no evidence.
inline constexpr std::string_view kNoEvidenceSentinel = "I'm not sure";

bool is_no_evidence_reply(std::string_view reply);

}  // namespace mempal
