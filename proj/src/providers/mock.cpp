#include "providers/mock.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "common/text.hpp"
#include "providers/prompts.hpp"

namespace mempal {

namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "pal",   "where", "is",    "are",   "my",   "the",     "a",      "an",    "i",     "can",   "cant",
      "cannot", "find", "did",   "put",   "leave", "left",   "of",     "in",    "at",    "on",    "near",
      "to",    "objects", "was", "were",  "you",  "me",      "it",     "be",    "more",  "specific", "what",
      "doing", "do",    "seen",  "have",  "looking", "for",  "with",   "and",   "last",  "saw",   "before",
      "right", "please", "hey",  "could", "tell", "im",      "am",     "by",    "from",  "this",  "that",
      "your",  "our",   "there", "into",  "onto", "some",    "again",  "help",  "lost", "misplaced", "or"};
  return kWords;
}

const std::unordered_map<std::string, std::string>& aliases() {
  static const std::unordered_map<std::string, std::string> kAliases = {
      {"spectacles", "glasses"},   {"spectacle", "glasses"},   {"eyeglasses", "glasses"},
      {"specs", "glasses"},        {"glasses", "glasses"},     {"keys", "key"},
      {"keychain", "key"},         {"phones", "phone"},        {"cellphone", "phone"},
      {"smartphone", "phone"},     {"iphone", "phone"},        {"mobile", "phone"},
      {"cups", "cup"},             {"mug", "cup"},             {"mugs", "cup"},
      {"medications", "medication"}, {"medicine", "medication"}, {"medicines", "medication"},
      {"pills", "medication"},     {"pill", "medication"},     {"meds", "medication"},
      {"tablets", "medication"},   {"headphone", "headphones"}, {"headphones", "headphones"},
      {"earphones", "headphones"}, {"headset", "headphones"},  {"earbuds", "headphones"},
      {"chargers", "charger"},     {"cable", "charger"},       {"remotes", "remote"},
      {"clicker", "remote"},       {"controller", "remote"},   {"wallets", "wallet"},
      {"billfold", "wallet"},      {"watches", "watch"},       {"wristwatch", "watch"},
      {"rings", "ring"},           {"books", "book"},          {"novel", "book"},
      {"folders", "folder"},       {"binder", "folder"},       {"bottles", "bottle"},
      {"scissor", "scissors"},     {"scissors", "scissors"},   {"rulers", "ruler"},
      {"mice", "mouse"},           {"magnifier", "magnifying"}, {"glass", "glass"},
      {"news", "news"},
  };
  return kAliases;
}

// Object phrases the mock language model recognizes when asked to pull an
// object out of a query that the rule patterns missed.
const std::vector<std::string>& extractable_objects() {
  static const std::vector<std::string> kPhrases = {
      "magnifying glass", "id card", "reading glasses", "folder", "cup", "phone", "bottle", "medication",
      "glasses", "spectacles", "headphones", "book", "charger", "remote", "ring", "wallet", "watch",
      "tape", "scissors", "ruler", "mouse", "keys", "key", "pills", "mug"};
  return kPhrases;
}

std::vector<double> gaussian_direction(std::string_view feature, std::size_t dim, std::uint64_t seed) {
  Rng rng(mix64(fnv1a64(feature) ^ seed));
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.normal();
  return v;
}

EmbeddingVector unit_from_hash(std::string_view key, std::size_t dim, std::uint64_t seed) {
  return EmbeddingVector(gaussian_direction(key, dim, seed)).normalized();
}

struct DocFields {
  std::string time, location, objects, background, activity;
};

std::optional<DocFields> parse_doc(const std::string& doc) {
  auto parts = split(doc, '|');
  if (parts.size() < 4) return std::nullopt;
  DocFields f;
  f.time = trim(parts[0]);
  f.location = trim(parts[1]);
  f.objects = trim(parts[2]);
  f.background = trim(parts[3]);
  if (parts.size() > 4) f.activity = trim(parts[4]);
  return f;
}

std::string question_of(std::string_view prompt) {
  const auto pos = prompt.rfind(kQuestionLabel);
  if (pos == std::string_view::npos) return to_lower(prompt);
  auto rest = prompt.substr(pos + kQuestionLabel.size());
  const auto nl = rest.find('\n');
  return to_lower(trim(rest.substr(0, nl)));
}

bool contains_word(const std::vector<std::string>& tokens, std::string_view w) {
  return std::find(tokens.begin(), tokens.end(), w) != tokens.end();
}

}  // namespace

LatencySimulator::LatencySimulator(std::shared_ptr<Clock> clock, MockLatency latency, std::uint64_t seed)
    : clock_(std::move(clock)), latency_(latency), rng_(seed) {}

void LatencySimulator::spend() {
  if (!clock_ || latency_.mean_s <= 0.0) return;
  double s;
  {
    std::lock_guard lock(mu_);
    s = rng_.lognormal_mean_sd(latency_.mean_s, latency_.sd_s);
  }
  clock_->sleep_for(from_seconds(s));
}

std::vector<std::string> MockTextEmbedder::features(std::string_view text) {
  std::vector<std::string> out;
  for (auto& tok : word_tokens(text)) {
    if (stopwords().count(tok)) continue;
    if (auto it = aliases().find(tok); it != aliases().end()) {
      out.push_back(it->second);
    } else if (tok.size() > 3 && tok.back() == 's' && tok[tok.size() - 2] != 's') {
      out.push_back(tok.substr(0, tok.size() - 1));
    } else {
      out.push_back(std::move(tok));
    }
  }
  return out;
}

MockTextEmbedder::MockTextEmbedder(std::size_t dim, std::uint64_t seed, std::shared_ptr<Clock> clock,
                                   MockLatency latency)
    : dim_(dim), seed_(seed) {
  if (dim == 0) fail(ErrorCode::InvalidArgument, "embedding dimension must be positive");
  if (clock) latency_ = std::make_unique<LatencySimulator>(std::move(clock), latency, seed ^ 0x7e7e);
}

EmbeddingVector MockTextEmbedder::embed_text(std::string_view text) {
  const auto cleaned = trim(text);
  if (cleaned.empty()) fail(ErrorCode::EmptyText, "cannot embed empty text");
  if (latency_) latency_->spend();

  auto feats = features(cleaned);
  if (feats.empty()) feats.push_back(normalize_label(cleaned));

  std::vector<double> sum(dim_, 0.0);
  for (const auto& f : feats) {
    const auto dir = gaussian_direction(f, dim_, seed_);
    for (std::size_t i = 0; i < dim_; ++i) sum[i] += dir[i];
  }
  return EmbeddingVector(std::move(sum)).normalized();
}

MockImageEmbedder::MockImageEmbedder(std::size_t dim, std::uint64_t seed, std::shared_ptr<Clock> clock,
                                     MockLatency latency)
    : dim_(dim), seed_(seed) {
  if (dim == 0) fail(ErrorCode::InvalidArgument, "embedding dimension must be positive");
  if (clock) latency_ = std::make_unique<LatencySimulator>(std::move(clock), latency, seed ^ 0x1a1a);
}

EmbeddingVector MockImageEmbedder::embed_image(const ImageRef& frame) {
  if (latency_) latency_->spend();
  if (frame.embedding) {
    if (frame.embedding->dim() != dim_) {
      fail(ErrorCode::DimMismatch, "frame embedding has dim " + std::to_string(frame.embedding->dim()) +
                                       ", engine dim is " + std::to_string(dim_));
    }
    return *frame.embedding;
  }
  if (frame.pixels) {
    const auto& px = frame.pixels->rgb;
    return unit_from_hash(std::string_view(reinterpret_cast<const char*>(px.data()), px.size()), dim_, seed_);
  }
  return unit_from_hash("frame:" + frame.id, dim_, seed_);
}

MockVisionLanguageModel::MockVisionLanguageModel(std::shared_ptr<Clock> clock, MockLatency latency) {
  if (clock) latency_ = std::make_unique<LatencySimulator>(std::move(clock), latency, kMockSeed ^ 0x5151);
}

void MockVisionLanguageModel::script(const std::string& batch_id, std::string raw_reply) {
  std::lock_guard lock(mu_);
  replies_[batch_id] = std::move(raw_reply);
}

void MockVisionLanguageModel::fail_with(const std::string& batch_id, ErrorCode code) {
  std::lock_guard lock(mu_);
  failures_[batch_id] = code;
}

VlmDescription MockVisionLanguageModel::describe(const ImageRef& tiled_image, std::string_view previous_activity,
                                                 std::string_view prompt) {
  if (trim(prompt).empty()) fail(ErrorCode::InvalidArgument, "vision prompt must not be empty");
  calls_.fetch_add(1);
  std::string raw;
  {
    std::lock_guard lock(mu_);
    log_.push_back(tiled_image.tag);
    contexts_.emplace_back(previous_activity);
    if (auto f = failures_.find(tiled_image.tag); f != failures_.end()) {
      fail(f->second, "scripted failure for batch '" + tiled_image.tag + "'");
    }
    auto it = replies_.find(tiled_image.tag);
    if (it == replies_.end()) {
      fail(ErrorCode::MalformedProviderOutput, "no scripted description for batch '" + tiled_image.tag + "'");
    }
    raw = it->second;
  }
  if (latency_) latency_->spend();
  return parse_vlm_reply(raw);
}

std::vector<std::string> MockVisionLanguageModel::call_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::vector<std::string> MockVisionLanguageModel::context_log() const {
  std::lock_guard lock(mu_);
  return contexts_;
}

MockLanguageModel::MockLanguageModel(std::shared_ptr<Clock> clock, MockLatency latency) {
  if (clock) latency_ = std::make_unique<LatencySimulator>(std::move(clock), latency, kMockSeed ^ 0x2b2b);
}

std::string MockLanguageModel::complete(std::string_view prompt, std::span<const std::string> context_docs) {
  if (trim(prompt).empty()) fail(ErrorCode::InvalidArgument, "prompt must not be empty");
  calls_.fetch_add(1);
  for (auto n = fail_next_.load(); n > 0; n = fail_next_.load()) {
    if (fail_next_.compare_exchange_weak(n, n - 1)) {
      fail(ErrorCode::ProviderUnavailable, "mock language model forced failure");
    }
  }
  if (latency_) latency_->spend();

  if (prompt.rfind(kExtractObjectTask, 0) == 0) {
    const auto q = " " + join(word_tokens(question_of(prompt)), " ") + " ";
    for (const auto& phrase : extractable_objects()) {
      if (q.find(" " + phrase + " ") != std::string::npos) return "OBJECT: " + phrase;
    }
    return "NONE";
  }

  if (context_docs.empty()) return std::string(kNoEvidenceSentinel);

  const auto question_text = question_of(prompt);
  const auto question = word_tokens(question_text);
  const bool before = contains_word(question, "before") && (contains_word(question, "doing") || contains_word(question, "do"));
  const auto wanted = MockTextEmbedder::features(question_text);
  auto mentions = [&](const std::string& text) {
    for (const auto& f : MockTextEmbedder::features(text)) {
      if (std::find(wanted.begin(), wanted.end(), f) != wanted.end()) return true;
    }
    return false;
  };

  // The first doc that mentions something the question asks about. Questions
  // without content words (follow-ups, "before" recall) use the first doc.
  std::optional<DocFields> doc;
  for (const auto& raw : context_docs) {
    auto d = parse_doc(raw);
    if (!d) continue;
    if (before || wanted.empty() || mentions(d->objects + " " + d->activity)) {
      doc = std::move(d);
      break;
    }
  }
  if (!doc) return std::string(kNoEvidenceSentinel);

  std::string object = "item";
  for (const auto& o : split(doc->objects, ',')) {
    const auto t = trim(o);
    if (t.empty()) continue;
    if (object == "item") object = t;
    if (mentions(t)) {
      object = t;
      break;
    }
  }

  if (before) {
    if (doc->activity.empty()) return std::string(kNoEvidenceSentinel);
    return "Right before that, you were " + doc->activity + " in the " + doc->location + " at " + doc->time;
  }
  if (contains_word(question, "specific")) {
    std::string out = "Your " + object + " was last seen at " + doc->time + " in the " + doc->location;
    if (!doc->background.empty()) out += ", near " + doc->background;
    if (!doc->activity.empty()) out += ", while you were " + doc->activity;
    return out;
  }
  std::string out = "Your " + object + " was last seen at " + doc->time + " in the " + doc->location;
  if (!doc->background.empty()) out += " near " + doc->background;
  return out;
}

std::string MockTranscriber::transcribe(const AudioRef& audio) {
  if (!audio.transcript) fail(ErrorCode::NoTranscriptAttached, "audio carries no transcript");
  return *audio.transcript;
}

}  // namespace mempal
