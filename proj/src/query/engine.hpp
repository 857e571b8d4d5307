#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "common/time.hpp"
#include "providers/providers.hpp"
#include "query/intent.hpp"
#include "query/session.hpp"
#include "store/activities_db.hpp"

namespace mempal {

enum class AnswerPath { ExactMatch, Rag, NotFound };

std::string_view to_string(AnswerPath p);
AnswerPath answer_path_from_string(std::string_view s);

struct Answer {
  std::string text;
  AnswerPath path = AnswerPath::NotFound;
  std::optional<RecordId> supporting_record;
  Duration latency{0};
  Intent intent;
  std::optional<std::string> object;
};

// {text, path, supporting_record, latency_ms, intent, wakeword_present, object}
nlohmann::json answer_to_json(const Answer& a);

struct QueryConfig {
  std::size_t top_k = kDefaultTopK;
  // Retrieved docs scoring below this cosine are not shown to the model.
  double rag_min_score = 0.25;
  int utc_offset_minutes = 0;
  // Prior turns serialized into follow-up prompts.
  std::size_t history_turns = 6;
  // Records preceding the anchor handed over for "what was I doing before" questions.
  std::size_t recall_window = 3;
};

// Maps a stored room label to the label shown in answers (room renames).
using RoomDisplay = std::function<std::string(const std::string&)>;

class QueryEngine {
 public:
  QueryEngine(std::shared_ptr<TextEmbedder> embedder, std::shared_ptr<LanguageModel> llm,
              std::shared_ptr<Clock> clock = nullptr, QueryConfig config = {});

  // Parse, dispatch on the intent, and record the turn in the session.
  Answer ask(std::string_view transcript, const DiarySnapshot& diary, ChatSession& session, Timestamp now);

  Intent parse(std::string_view transcript, const ChatSession& session) const;

  // Exact object match first (most recent record), RAG otherwise.
  Answer answer_object_query(const Intent& intent, const DiarySnapshot& diary, ChatSession& session, Timestamp now);
  // Throws NoPriorTurn on an empty session.
  Answer answer_followup(const Intent& intent, const DiarySnapshot& diary, ChatSession& session, Timestamp now);
  // "What did I do before I misplaced X": the records preceding X's last sighting.
  Answer answer_recall(const Intent& intent, const DiarySnapshot& diary, ChatSession& session, Timestamp now);

  void set_room_display(RoomDisplay display);
  const QueryConfig& config() const { return config_; }

 private:
  struct Context {
    std::vector<std::string> docs;
    std::vector<RecordPtr> records;
  };

  std::string display_room(const std::string& label) const;
  void add_doc(Context& ctx, const RecordPtr& r) const;
  Context rag_context(std::string_view query_text, const DiarySnapshot& diary, const RecordPtr& exclude = nullptr) const;
  std::string history_block(const ChatSession& session) const;
  Answer complete(const Intent& intent, const std::string& prompt, const Context& ctx) const;
  Answer finish(Answer a, const std::string& query, ChatSession& session, Timestamp now, Duration started) const;

  std::shared_ptr<TextEmbedder> embedder_;
  std::shared_ptr<LanguageModel> llm_;
  std::shared_ptr<Clock> clock_;
  QueryConfig config_;
  mutable std::mutex display_mu_;
  RoomDisplay display_;
};

}  // namespace mempal
