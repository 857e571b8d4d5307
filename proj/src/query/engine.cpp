#include "query/engine.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/log.hpp"
#include "common/text.hpp"
#include "providers/prompts.hpp"
#include "query/templates.hpp"

namespace mempal {

namespace {

constexpr std::string_view kAnswerInstructions =
    "You help a user find things they put down. Answer using only the diary entries given as context; each entry "
    "reads: time | room | objects in hand | surroundings | activity. Answer in one sentence of the form \"Your "
    "<object> was last seen at <time> in the <room> near <surroundings>\". If no entry mentions what is asked, "
    "reply exactly \"I'm not sure\".\n";

bool is_provider_fault(const Error& e) {
  return e.code() == ErrorCode::ProviderUnavailable || e.code() == ErrorCode::MalformedProviderOutput ||
         e.code() == ErrorCode::DimMismatch;
}

bool asks_before(std::string_view text) {
  const auto toks = word_tokens(text);
  auto has = [&](std::string_view w) { return std::find(toks.begin(), toks.end(), w) != toks.end(); };
  return has("before");
}

Answer not_found(const Intent& intent) {
  Answer a;
  a.text = std::string(kNotSureAnswer);
  a.path = AnswerPath::NotFound;
  a.intent = intent;
  return a;
}

}  // namespace

std::string_view to_string(AnswerPath p) {
  switch (p) {
    case AnswerPath::ExactMatch: return "exact_match";
    case AnswerPath::Rag: return "rag";
    case AnswerPath::NotFound: return "not_found";
  }
  return "not_found";
}

AnswerPath answer_path_from_string(std::string_view s) {
  if (s == "exact_match") return AnswerPath::ExactMatch;
  if (s == "rag") return AnswerPath::Rag;
  if (s == "not_found") return AnswerPath::NotFound;
  fail(ErrorCode::InvalidArgument, "unknown answer path '" + std::string(s) + "'");
}

nlohmann::json answer_to_json(const Answer& a) {
  return {{"text", a.text},
          {"path", to_string(a.path)},
          {"supporting_record", a.supporting_record ? nlohmann::json(a.supporting_record->value) : nlohmann::json(nullptr)},
          {"latency_ms", std::chrono::duration<double, std::milli>(a.latency).count()},
          {"intent", intent_to_json(a.intent)},
          {"wakeword_present", a.intent.wakeword_present},
          {"object", a.object ? nlohmann::json(*a.object) : nlohmann::json(nullptr)}};
}

QueryEngine::QueryEngine(std::shared_ptr<TextEmbedder> embedder, std::shared_ptr<LanguageModel> llm,
                         std::shared_ptr<Clock> clock, QueryConfig config)
    : embedder_(std::move(embedder)), llm_(std::move(llm)), clock_(std::move(clock)), config_(config) {
  if (!embedder_ || !llm_) fail(ErrorCode::InvalidArgument, "query engine needs an embedder and a language model");
  if (!clock_) clock_ = std::make_shared<SteadyClock>();
  if (config_.top_k == 0) fail(ErrorCode::InvalidArgument, "top_k must be positive");
}

void QueryEngine::set_room_display(RoomDisplay display) {
  std::lock_guard lock(display_mu_);
  display_ = std::move(display);
}

std::string QueryEngine::display_room(const std::string& label) const {
  std::lock_guard lock(display_mu_);
  return display_ ? display_(label) : label;
}

Intent QueryEngine::parse(std::string_view transcript, const ChatSession& session) const {
  return parse_query(transcript, session, llm_.get());
}

Answer QueryEngine::ask(std::string_view transcript, const DiarySnapshot& diary, ChatSession& session, Timestamp now) {
  const Duration started = clock_->now();
  const Intent intent = parse(transcript, session);
  Answer a;
  switch (intent.category) {
    case IntentCategory::ObjectLocation: a = answer_object_query(intent, diary, session, now); break;
    case IntentCategory::Recall: a = answer_recall(intent, diary, session, now); break;
    case IntentCategory::FollowUp: a = answer_followup(intent, diary, session, now); break;
    case IntentCategory::Unknown: a = finish(not_found(intent), intent.raw_text, session, now, started); break;
  }
  a.latency = clock_->now() - started;
  return a;
}

void QueryEngine::add_doc(Context& ctx, const RecordPtr& r) const {
  ctx.docs.push_back(format_context_doc(*r, display_room(r->location), config_.utc_offset_minutes));
  ctx.records.push_back(r);
}

QueryEngine::Context QueryEngine::rag_context(std::string_view query_text, const DiarySnapshot& diary,
                                              const RecordPtr& exclude) const {
  Context ctx;
  if (diary.size() == 0 || trim(query_text).empty()) return ctx;
  const EmbeddingVector q = embedder_->embed_text(query_text);
  for (const auto& hit : diary.topk(q, config_.top_k)) {
    if (hit.score < config_.rag_min_score) break;
    if (exclude && hit.record->id == exclude->id) continue;
    add_doc(ctx, hit.record);
  }
  return ctx;
}

std::string QueryEngine::history_block(const ChatSession& session) const {
  if (session.empty() || config_.history_turns == 0) return {};
  const auto& turns = session.turns();
  const std::size_t n = std::min(config_.history_turns, turns.size());
  std::string out = "Conversation so far:\n";
  for (std::size_t i = turns.size() - n; i < turns.size(); ++i) {
    out += "User: " + turns[i].query + "\nPal: " + turns[i].answer + "\n";
  }
  return out;
}

Answer QueryEngine::complete(const Intent& intent, const std::string& prompt, const Context& ctx) const {
  if (ctx.docs.empty()) return not_found(intent);
  std::string reply;
  try {
    reply = trim(llm_->complete(prompt, ctx.docs));
  } catch (const Error& e) {
    if (!is_provider_fault(e)) throw;
    log_warning(std::string("language model failed: ") + e.what() + "; answering not sure");
    return not_found(intent);
  }
  if (reply.empty() || is_no_evidence_reply(reply)) return not_found(intent);
  Answer a;
  a.text = reply;
  a.path = AnswerPath::Rag;
  a.supporting_record = ctx.records.front()->id;
  a.intent = intent;
  return a;
}

Answer QueryEngine::finish(Answer a, const std::string& query, ChatSession& session, Timestamp now,
                           Duration started) const {
  a.latency = clock_->now() - started;
  Turn turn;
  turn.query = query;
  turn.answer = a.text;
  turn.intent = a.intent;
  turn.t = session.empty() ? now : std::max(now, session.turns().back().t);
  turn.object = a.object;
  turn.supporting_record = a.supporting_record;
  session.add_turn(std::move(turn));
  return a;
}

Answer QueryEngine::answer_object_query(const Intent& intent, const DiarySnapshot& diary, ChatSession& session,
                                        Timestamp now) {
  if (intent.category != IntentCategory::ObjectLocation || !intent.object_phrase) {
    fail(ErrorCode::InvalidArgument, "not an object-location intent");
  }
  const Duration started = clock_->now();
  const std::string object = normalize_object_phrase(*intent.object_phrase);

  Answer a;
  const auto exact = diary.filter_exact(object);
  if (!exact.empty()) {
    const RecordPtr& r = exact.back();
    a.text = format_last_seen(object, r->timestamp, display_room(r->location), r->background,
                              config_.utc_offset_minutes);
    a.path = a.text == kNotSureAnswer ? AnswerPath::NotFound : AnswerPath::ExactMatch;
    a.supporting_record = r->id;
    a.intent = intent;
  } else {
    try {
      const std::string question = trim(intent.raw_text).empty() ? object : intent.raw_text;
      const Context ctx = rag_context(question, diary);
      a = complete(intent, std::string(kAnswerInstructions) + std::string(kQuestionLabel) + " " + question, ctx);
    } catch (const Error& e) {
      if (!is_provider_fault(e)) throw;
      log_warning(std::string("query embedding failed: ") + e.what() + "; answering not sure");
      a = not_found(intent);
    }
  }
  a.object = object;
  return finish(std::move(a), intent.raw_text, session, now, started);
}

Answer QueryEngine::answer_followup(const Intent& intent, const DiarySnapshot& diary, ChatSession& session,
                                    Timestamp now) {
  if (session.empty()) fail(ErrorCode::NoPriorTurn, "follow-up without a prior turn");
  const Duration started = clock_->now();

  const Turn* carried = session.last_object_turn();
  const Turn& last = session.turns().back();
  RecordPtr anchor;
  if (last.supporting_record) anchor = diary.find(*last.supporting_record);
  if (!anchor && carried && carried->supporting_record) anchor = diary.find(*carried->supporting_record);
  const std::optional<std::string> object = carried ? carried->object : std::nullopt;

  const std::string prompt = std::string(kAnswerInstructions) + history_block(session) +
                             std::string(kQuestionLabel) + " " + intent.raw_text;
  Answer a;
  try {
    Context ctx;
    if (asks_before(intent.raw_text)) {
      if (anchor) {
        for (const auto& r : diary.preceding(*anchor, config_.recall_window)) add_doc(ctx, r);
      }
    } else {
      if (anchor) add_doc(ctx, anchor);
      const std::string query = object ? *object + " " + intent.raw_text : intent.raw_text;
      Context more = rag_context(query, diary, anchor);
      ctx.docs.insert(ctx.docs.end(), more.docs.begin(), more.docs.end());
      ctx.records.insert(ctx.records.end(), more.records.begin(), more.records.end());
    }
    a = complete(intent, prompt, ctx);
  } catch (const Error& e) {
    if (!is_provider_fault(e)) throw;
    log_warning(std::string("follow-up retrieval failed: ") + e.what() + "; answering not sure");
    a = not_found(intent);
  }
  a.object = object;
  return finish(std::move(a), intent.raw_text, session, now, started);
}

Answer QueryEngine::answer_recall(const Intent& intent, const DiarySnapshot& diary, ChatSession& session,
                                  Timestamp now) {
  if (intent.category != IntentCategory::Recall || !intent.object_phrase) {
    fail(ErrorCode::InvalidArgument, "not a recall intent");
  }
  const Duration started = clock_->now();
  const std::string object = normalize_object_phrase(*intent.object_phrase);

  Answer a;
  try {
    RecordPtr anchor;
    const auto exact = diary.filter_exact(object);
    if (!exact.empty()) {
      anchor = exact.back();
    } else {
      const Context near = rag_context(object, diary);
      if (!near.records.empty()) anchor = near.records.front();
    }
    Context ctx;
    if (anchor) {
      for (const auto& r : diary.preceding(*anchor, config_.recall_window)) add_doc(ctx, r);
    }
    a = complete(intent, std::string(kAnswerInstructions) + std::string(kQuestionLabel) + " " + intent.raw_text, ctx);
  } catch (const Error& e) {
    if (!is_provider_fault(e)) throw;
    log_warning(std::string("recall retrieval failed: ") + e.what() + "; answering not sure");
    a = not_found(intent);
  }
  a.object = object;
  return finish(std::move(a), intent.raw_text, session, now, started);
}

}  // namespace mempal
