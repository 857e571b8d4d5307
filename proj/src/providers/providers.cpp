#include "providers/providers.hpp"

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace mempal {

VlmDescription parse_vlm_reply(std::string_view raw) {
  const auto j = nlohmann::json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ErrorCode::MalformedProviderOutput, "vision reply is not a JSON object");
  }
  const auto field_string = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      fail(ErrorCode::MalformedProviderOutput, std::string("vision reply lacks string field '") + key + "'");
    }
    return trim(it->get<std::string>());
  };

  VlmDescription d;
  d.activity = field_string("activity");
  d.background = field_string("background");

  auto objs = j.find("objects");
  if (objs == j.end()) objs = j.find("objects_in_hand");
  if (objs == j.end() || !objs->is_array()) {
    fail(ErrorCode::MalformedProviderOutput, "vision reply lacks an 'objects' array");
  }
  std::vector<std::string> raw_objects;
  for (const auto& o : *objs) {
    if (!o.is_string()) fail(ErrorCode::MalformedProviderOutput, "vision reply objects must be strings");
    raw_objects.push_back(o.get<std::string>());
  }
  d.objects_in_hand = normalize_object_list(raw_objects);
  return d;
}

void ProviderConfig::validate() const {
  if (kind == Kind::RemoteHttp && (!endpoint || endpoint->empty())) {
    fail(ErrorCode::InvalidArgument, "remote-http provider requires an endpoint");
  }
  if (timeout.count() <= 0) fail(ErrorCode::InvalidArgument, "provider timeout must be positive");
  if (retry_budget < 0) fail(ErrorCode::InvalidArgument, "retry budget must be non-negative");
}

ProviderConfig provider_config_from_json(const nlohmann::json& j) {
  ProviderConfig c;
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "provider config must be an object");
  const auto kind = j.value("kind", std::string("mock"));
  if (kind == "mock") {
    c.kind = ProviderConfig::Kind::Mock;
  } else if (kind == "remote-http") {
    c.kind = ProviderConfig::Kind::RemoteHttp;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown provider kind '" + kind + "'");
  }
  if (j.contains("endpoint") && !j["endpoint"].is_null()) c.endpoint = j["endpoint"].get<std::string>();
  c.timeout = std::chrono::milliseconds{j.value("timeout_ms", static_cast<long long>(c.timeout.count()))};
  c.retry_budget = j.value("retry_budget", c.retry_budget);
  c.backoff_base = std::chrono::milliseconds{j.value("backoff_ms", static_cast<long long>(c.backoff_base.count()))};
  if (j.contains("latency")) {
    c.latency.mean_s = j["latency"].value("mean_s", 0.0);
    c.latency.sd_s = j["latency"].value("sd_s", 0.0);
  }
  c.validate();
  return c;
}

nlohmann::json to_json_value(const ProviderConfig& c) {
  nlohmann::json j;
  j["kind"] = c.kind == ProviderConfig::Kind::Mock ? "mock" : "remote-http";
  if (c.endpoint) j["endpoint"] = *c.endpoint;
  j["timeout_ms"] = c.timeout.count();
  j["retry_budget"] = c.retry_budget;
  j["backoff_ms"] = c.backoff_base.count();
  j["latency"] = {{"mean_s", c.latency.mean_s}, {"sd_s", c.latency.sd_s}};
  return j;
}

bool is_no_evidence_reply(std::string_view reply) {
  const auto t = normalize_label(reply);
  return t.rfind("i'm not sure", 0) == 0 || t.rfind("i’m not sure", 0) == 0 || t.rfind("im not sure", 0) == 0 ||
         t.rfind("i am not sure", 0) == 0;
}

}  // namespace mempal
