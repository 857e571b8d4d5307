#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "common/time.hpp"
#include "providers/embedding.hpp"

namespace mempal {

struct RecordId {
  std::uint64_t value = 0;

  bool valid() const { return value != 0; }
  friend auto operator<=>(const RecordId&, const RecordId&) = default;
};

// One diary entry. Immutable once inserted; the store hands out
// shared_ptr<const ActivityRecord>.
struct ActivityRecord {
  RecordId id;
  std::string session_id;
  Timestamp timestamp;
  std::string location;
  std::string activity;
  std::vector<std::string> objects_in_hand;
  std::string background;
  EmbeddingVector embedding;
  std::string source_batch;

  bool mentions(std::string_view object) const;
};

using RecordPtr = std::shared_ptr<const ActivityRecord>;

inline constexpr int kDiarySchemaVersion = 1;

// The text a record is embedded from:
//   "<activity> | objects: <o1,o2> | at <location> | near <background>"
std::string compose_record_text(const std::string& activity, const std::vector<std::string>& objects,
                                const std::string& location, const std::string& background);

// One diary line. Carries "schema": kDiarySchemaVersion.
nlohmann::json record_to_json(const ActivityRecord& r);
ActivityRecord record_from_json(const nlohmann::json& j);

}  // namespace mempal
