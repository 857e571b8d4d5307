#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mempal {

// A fixed-length real vector. Construction rejects empty and non-finite
// input, so every instance in the engine is usable by cosine().
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const noexcept;
  // Throws Error{ZeroVector} for the all-zero vector.
  EmbeddingVector normalized() const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

nlohmann::json to_json_value(const EmbeddingVector& v);
EmbeddingVector embedding_from_json(const nlohmann::json& j);

}  // namespace mempal
