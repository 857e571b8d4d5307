#include "ingest/frame_batch.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace mempal {

FrameBatch batch_from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "frame batch must be a JSON object");
  FrameBatch b;
  try {
    b.batch_id = j.at("batch_id").get<std::string>();
    if (trim(b.batch_id).empty()) fail(ErrorCode::InvalidArgument, "batch_id must not be empty");
    b.session_id = j.value("session_id", std::string("default"));
    b.captured_at = timestamp_from_json(j.at("t"));
    if (j.contains("hands") && !j["hands"].is_null()) b.hands = j["hands"].get<bool>();

    if (j.contains("frames")) {
      for (const auto& f : j["frames"]) b.frames.push_back(frame_from_spec(f.get<std::string>(), base_dir));
    }
    std::vector<EmbeddingVector> embeddings;
    if (j.contains("embeddings")) {
      for (const auto& e : j["embeddings"]) embeddings.push_back(embedding_from_json(e));
    } else if (j.contains("embedding")) {
      embeddings.push_back(embedding_from_json(j["embedding"]));
    }
    if (b.frames.empty()) {
      for (std::size_t i = 0; i < embeddings.size(); ++i) {
        ImageRef ref;
        ref.id = b.batch_id + "#" + std::to_string(i);
        b.frames.push_back(std::move(ref));
      }
    }
    if (embeddings.size() > b.frames.size()) {
      fail(ErrorCode::InvalidArgument, "batch '" + b.batch_id + "' has more embeddings than frames");
    }
    for (std::size_t i = 0; i < embeddings.size(); ++i) b.frames[i].embedding = embeddings[i];
    for (auto& f : b.frames) f.tag = b.batch_id;

    if (j.contains("vlm") && !j["vlm"].is_null()) {
      b.vlm_reply = j["vlm"].is_string() ? j["vlm"].get<std::string>() : j["vlm"].dump();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed frame batch: ") + e.what());
  }
  return b;
}

nlohmann::json batch_to_json(const FrameBatch& b) {
  nlohmann::json j = {{"batch_id", b.batch_id}, {"session_id", b.session_id}, {"t", format_rfc3339(b.captured_at)}};
  if (b.hands) j["hands"] = *b.hands;
  nlohmann::json frames = nlohmann::json::array();
  nlohmann::json embeddings = nlohmann::json::array();
  for (const auto& f : b.frames) {
    frames.push_back(f.id);
    if (f.embedding) embeddings.push_back(to_json_value(*f.embedding));
  }
  j["frames"] = frames;
  if (!embeddings.empty()) j["embeddings"] = embeddings;
  if (b.vlm_reply) {
    auto parsed = nlohmann::json::parse(*b.vlm_reply, nullptr, false);
    j["vlm"] = parsed.is_discarded() ? nlohmann::json(*b.vlm_reply) : parsed;
  }
  return j;
}

std::vector<FrameBatch> read_batches_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open batches file '" + path.string() + "'");
  const auto base = path.parent_path().string();
  std::vector<FrameBatch> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      fail(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(line_no) + " is not JSON");
    }
    out.push_back(batch_from_json(j, base));
  }
  return out;
}

}  // namespace mempal
