#include "providers/remote.hpp"

#include <httplib.h>

#include "common/error.hpp"
#include "common/text.hpp"

namespace mempal {

std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorCode::InvalidArgument, "endpoint '" + url + "' lacks a scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

HttpJsonClient::HttpJsonClient(ProviderConfig config, std::shared_ptr<Clock> clock)
    : config_(std::move(config)), clock_(clock ? std::move(clock) : std::make_shared<SteadyClock>()) {
  config_.validate();
  if (config_.kind != ProviderConfig::Kind::RemoteHttp) {
    fail(ErrorCode::InvalidArgument, "HttpJsonClient requires a remote-http provider config");
  }
  std::tie(origin_, path_) = split_endpoint(*config_.endpoint);
}

nlohmann::json HttpJsonClient::post(const nlohmann::json& body) const {
  const auto payload = body.dump();
  std::string last_error;
  auto backoff = config_.backoff_base;
  for (int attempt = 0; attempt <= config_.retry_budget; ++attempt) {
    if (attempt > 0) {
      clock_->sleep_for(backoff);
      backoff *= 2;
    }
    attempts_.fetch_add(1);
    httplib::Client cli(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());

    auto res = cli.Post(path_, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status >= 400) {
      fail(ErrorCode::ProviderUnavailable, *config_.endpoint + " rejected request: HTTP " + std::to_string(res->status));
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::MalformedProviderOutput, *config_.endpoint + " returned non-JSON body");
    return j;
  }
  fail(ErrorCode::ProviderUnavailable,
       *config_.endpoint + " unavailable after " + std::to_string(config_.retry_budget + 1) + " attempts (" +
           last_error + ")");
}

namespace {

EmbeddingVector embedding_reply(const nlohmann::json& reply, std::size_t dim) {
  auto it = reply.find("embedding");
  if (it == reply.end()) fail(ErrorCode::MalformedProviderOutput, "embedding reply lacks 'embedding'");
  EmbeddingVector v;
  try {
    v = embedding_from_json(*it);
  } catch (const Error& e) {
    fail(ErrorCode::MalformedProviderOutput, std::string("bad embedding reply: ") + e.what());
  }
  if (v.dim() != dim) {
    fail(ErrorCode::DimMismatch,
         "embedding reply has dim " + std::to_string(v.dim()) + ", expected " + std::to_string(dim));
  }
  return v;
}

std::string image_payload(const ImageRef& ref) {
  if (ref.pixels) return base64_encode(encode_ppm(*ref.pixels));
  return {};
}

}  // namespace

RemoteTextEmbedder::RemoteTextEmbedder(ProviderConfig config, std::size_t dim, std::shared_ptr<Clock> clock)
    : client_(std::move(config), std::move(clock)), dim_(dim) {}

EmbeddingVector RemoteTextEmbedder::embed_text(std::string_view text) {
  const auto cleaned = trim(text);
  if (cleaned.empty()) fail(ErrorCode::EmptyText, "cannot embed empty text");
  return embedding_reply(client_.post({{"text", cleaned}}), dim_);
}

RemoteImageEmbedder::RemoteImageEmbedder(ProviderConfig config, std::size_t dim, std::shared_ptr<Clock> clock)
    : client_(std::move(config), std::move(clock)), dim_(dim) {}

EmbeddingVector RemoteImageEmbedder::embed_image(const ImageRef& frame) {
  if (frame.embedding) {
    if (frame.embedding->dim() != dim_) fail(ErrorCode::DimMismatch, "frame embedding dim mismatch");
    return *frame.embedding;
  }
  return embedding_reply(client_.post({{"image", image_payload(frame)}, {"frame_id", frame.id}}), dim_);
}

RemoteVisionLanguageModel::RemoteVisionLanguageModel(ProviderConfig config, std::shared_ptr<Clock> clock)
    : client_(std::move(config), std::move(clock)) {}

VlmDescription RemoteVisionLanguageModel::describe(const ImageRef& tiled_image, std::string_view previous_activity,
                                                   std::string_view prompt) {
  if (trim(prompt).empty()) fail(ErrorCode::InvalidArgument, "vision prompt must not be empty");
  nlohmann::json body = {{"images", nlohmann::json::array({image_payload(tiled_image)})},
                         {"image_format", "ppm"},
                         {"batch_id", tiled_image.tag},
                         {"previous_activity", previous_activity},
                         {"prompt", prompt}};
  return parse_vlm_reply(client_.post(body).dump());
}

RemoteLanguageModel::RemoteLanguageModel(ProviderConfig config, std::shared_ptr<Clock> clock)
    : client_(std::move(config), std::move(clock)) {}

std::string RemoteLanguageModel::complete(std::string_view prompt, std::span<const std::string> context_docs) {
  if (trim(prompt).empty()) fail(ErrorCode::InvalidArgument, "prompt must not be empty");
  nlohmann::json body = {{"prompt", prompt},
                         {"context", std::vector<std::string>(context_docs.begin(), context_docs.end())}};
  const auto reply = client_.post(body);
  auto it = reply.find("text");
  if (it == reply.end() || !it->is_string()) fail(ErrorCode::MalformedProviderOutput, "completion lacks 'text'");
  return it->get<std::string>();
}

RemoteTranscriber::RemoteTranscriber(ProviderConfig config, std::shared_ptr<Clock> clock)
    : client_(std::move(config), std::move(clock)) {}

std::string RemoteTranscriber::transcribe(const AudioRef& audio) {
  const auto reply = client_.post({{"audio", base64_encode(audio.bytes)}});
  auto it = reply.find("text");
  if (it == reply.end() || !it->is_string()) fail(ErrorCode::MalformedProviderOutput, "transcription lacks 'text'");
  return it->get<std::string>();
}

}  // namespace mempal
