#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "common/time.hpp"
#include "providers/embedding.hpp"
#include "store/activity_record.hpp"

namespace mempal::testing {

inline EmbeddingVector random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.normal();
  return EmbeddingVector(std::move(v)).normalized();
}

inline EmbeddingVector basis(std::size_t dim, std::size_t i) {
  std::vector<double> v(dim, 0.0);
  v[i] = 1.0;
  return EmbeddingVector(std::move(v));
}

// a*e_i + b*e_j, unnormalized.
inline EmbeddingVector mix(std::size_t dim, std::size_t i, double a, std::size_t j, double b) {
  std::vector<double> v(dim, 0.0);
  v[i] += a;
  v[j] += b;
  return EmbeddingVector(std::move(v));
}

// 2024-05-14 local-free clock times for fixtures.
inline Timestamp at_clock(int hour, int minute, int second = 0) {
  return parse_rfc3339("2024-05-14T00:00:00Z") + std::chrono::hours(hour) + std::chrono::minutes(minute) +
         std::chrono::seconds(second);
}

inline ActivityRecord make_record(std::string session, Timestamp t, std::string location, std::string activity,
                                  std::vector<std::string> objects, std::string background, EmbeddingVector emb,
                                  std::string batch = "b") {
  ActivityRecord r;
  r.session_id = std::move(session);
  r.timestamp = t;
  r.location = std::move(location);
  r.activity = std::move(activity);
  r.objects_in_hand = std::move(objects);
  r.background = std::move(background);
  r.embedding = std::move(emb);
  r.source_batch = std::move(batch);
  return r;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("mempal-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mempal::testing
