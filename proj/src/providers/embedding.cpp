#include "providers/embedding.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "common/error.hpp"

namespace mempal {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) fail(ErrorCode::InvalidArgument, "embedding must have positive dimension");
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "embedding contains a non-finite value");
  }
}

double EmbeddingVector::norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

EmbeddingVector EmbeddingVector::normalized() const {
  const double n = norm();
  if (n == 0.0) fail(ErrorCode::ZeroVector, "cannot normalize a zero vector");
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i] / n;
  return EmbeddingVector(std::move(out));
}

nlohmann::json to_json_value(const EmbeddingVector& v) {
  return nlohmann::json(std::vector<double>(v.values().begin(), v.values().end()));
}

EmbeddingVector embedding_from_json(const nlohmann::json& j) {
  if (!j.is_array()) fail(ErrorCode::InvalidArgument, "embedding must be a JSON array");
  std::vector<double> values;
  values.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) fail(ErrorCode::InvalidArgument, "embedding entries must be numbers");
    values.push_back(x.get<double>());
  }
  return EmbeddingVector(std::move(values));
}

}  // namespace mempal
