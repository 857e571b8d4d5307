#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "common/time.hpp"
#include "providers/providers.hpp"

namespace mempal {

// POSTs JSON to one endpoint with a bounded retry budget and exponential
// backoff (backoff_base, 2x, 4x, ...). Transport errors and 5xx replies are
// retried; exhaustion and 4xx replies raise ProviderUnavailable. A reply body
// that is not JSON raises MalformedProviderOutput. No shared mutable state:
// every call opens its own client.
class HttpJsonClient {
 public:
  HttpJsonClient(ProviderConfig config, std::shared_ptr<Clock> clock);

  nlohmann::json post(const nlohmann::json& body) const;

  std::size_t attempts() const { return attempts_.load(); }

 private:
  ProviderConfig config_;
  std::shared_ptr<Clock> clock_;
  std::string origin_;
  std::string path_;
  mutable std::atomic<std::size_t> attempts_{0};
};

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_endpoint(const std::string& url);

// Wire formats are documented in docs/wire-format.md.
class RemoteTextEmbedder final : public TextEmbedder {
 public:
  RemoteTextEmbedder(ProviderConfig config, std::size_t dim, std::shared_ptr<Clock> clock);
  EmbeddingVector embed_text(std::string_view text) override;
  std::size_t dim() const override { return dim_; }

 private:
  HttpJsonClient client_;
  std::size_t dim_;
};

class RemoteImageEmbedder final : public ImageEmbedder {
 public:
  RemoteImageEmbedder(ProviderConfig config, std::size_t dim, std::shared_ptr<Clock> clock);
  EmbeddingVector embed_image(const ImageRef& frame) override;
  std::size_t dim() const override { return dim_; }

 private:
  HttpJsonClient client_;
  std::size_t dim_;
};

class RemoteVisionLanguageModel final : public VisionLanguageModel {
 public:
  RemoteVisionLanguageModel(ProviderConfig config, std::shared_ptr<Clock> clock);
  VlmDescription describe(const ImageRef& tiled_image, std::string_view previous_activity,
                          std::string_view prompt) override;

 private:
  HttpJsonClient client_;
};

class RemoteLanguageModel final : public LanguageModel {
 public:
  RemoteLanguageModel(ProviderConfig config, std::shared_ptr<Clock> clock);
  std::string complete(std::string_view prompt, std::span<const std::string> context_docs) override;

 private:
  HttpJsonClient client_;
};

class RemoteTranscriber final : public Transcriber {
 public:
  RemoteTranscriber(ProviderConfig config, std::shared_ptr<Clock> clock);
  std::string transcribe(const AudioRef& audio) override;

 private:
  HttpJsonClient client_;
};

}  // namespace mempal
