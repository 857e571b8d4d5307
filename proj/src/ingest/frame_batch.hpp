#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "common/time.hpp"
#include "providers/image.hpp"

namespace mempal {

struct FrameBatch {
  std::string batch_id;
  std::string session_id = "default";
  Timestamp captured_at;
  std::vector<ImageRef> frames;

  // Scripted values consumed by the mock hand detector and mock VLM.
  std::optional<bool> hands;
  std::optional<std::string> vlm_reply;
};

// One line of the scenario ingestion format:
//   {"batch_id", "session_id"?, "t", "hands"?, "frames"?: [spec...],
//    "embeddings"?: [[...], ...] | "embedding"?: [...],
//    "vlm"?: {"activity", "objects", "background"} | "<raw reply>"}
// Frame specs follow frame_from_spec(); embeddings attach to frames in
// order (synthetic frames are created when only embeddings are given).
FrameBatch batch_from_json(const nlohmann::json& j, const std::string& base_dir = {});
nlohmann::json batch_to_json(const FrameBatch& b);

std::vector<FrameBatch> read_batches_jsonl(const std::filesystem::path& path);

}  // namespace mempal
