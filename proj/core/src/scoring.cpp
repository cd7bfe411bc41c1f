#include "salesmine/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "salesmine/text.hpp"

namespace salesmine {

Lexicons default_lexicons() {
  Lexicons lex;
  lex.greetings = {"hi", "hello", "hey", "thanks", "thank you", "thanks a lot", "ok", "okay",
                   "good morning", "good afternoon", "good evening", "bye", "goodbye",
                   "see you", "you are welcome", "no problem", "sure",
                   "你好", "您好", "谢谢", "好的", "嗯", "再见", "哈喽", "早上好"};
  lex.interrogatives = {"what", "how", "when", "where", "why", "which", "who", "whom", "whose",
                        "吗", "什么", "怎么", "怎样", "多少", "哪", "为什么", "是否", "能否", "几"};
  return lex;
}

std::vector<std::string> load_lexicon_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open lexicon file " + path.string());
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    std::string entry = text::collapse_whitespace(line);
    if (entry.empty() || entry.front() == '#') continue;
    if (!text::is_valid_utf8(entry)) throw ConfigError("lexicon " + path.string() + " is not UTF-8");
    entries.push_back(std::move(entry));
  }
  return entries;
}

void ScorerConfig::validate() const {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(per_label_threshold)) throw ConfigError("per_label_threshold must lie in [0,1]");
  if (!in_unit(answer_threshold)) throw ConfigError("answer_threshold must lie in [0,1]");
  if (embedding_dim == 0) throw ConfigError("embedding_dim must be positive");
  if (backend == ScorerBackend::Remote && (!remote_url || remote_url->empty())) {
    throw ConfigError("remote scorer backend requires remote_url");
  }
}

bool is_valid_question(const LabelScores& s, const ScorerConfig& config) {
  const double t = config.per_label_threshold;
  return s.semantic_integrity >= t && s.not_chitchat >= t && s.legal_inquiry >= t;
}

EmbeddingVector hashed_ngram_embedding(std::string_view raw, std::size_t dim) {
  EmbeddingVector v;
  v.values.assign(dim, 0.0);
  const std::u32string cps = text::decode_utf8(text::normalize_for_match(raw));
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      const std::string gram = text::encode_utf8(std::u32string_view(cps).substr(i, n));
      v.values[text::fnv1a64(gram) % dim] += 1.0;
    }
  }
  normalize_in_place(v);
  return v;
}

BaselineScorer::BaselineScorer(ScorerConfig config) : Scorer(std::move(config)) {
  for (const std::string& g : this->config().lexicons.greetings) {
    if (std::string key = text::token_key(g); !key.empty()) greeting_keys_.insert(std::move(key));
  }
  for (const std::string& q : this->config().lexicons.interrogatives) {
    if (auto tokens = text::tokenize(q); !tokens.empty()) interrogative_tokens_.push_back(std::move(tokens));
  }
}

LabelScores BaselineScorer::score_question(std::string_view utterance_text) const {
  const std::vector<std::string> tokens = text::tokenize(utterance_text);
  const std::string trimmed = text::collapse_whitespace(utterance_text);

  LabelScores s;
  s.semantic_integrity = tokens.size() >= 3 ? 1.0 : 0.0;
  s.not_chitchat = greeting_keys_.contains(text::join_tokens(tokens)) ? 0.0 : 1.0;

  const bool question_mark = trimmed.ends_with("?") || trimmed.ends_with("\xEF\xBC\x9F");
  bool interrogative = false;
  for (const auto& entry : interrogative_tokens_) {
    if (text::contains_token_run(tokens, entry)) {
      interrogative = true;
      break;
    }
  }
  s.legal_inquiry = (question_mark || interrogative) ? 1.0 : 0.0;
  return s;
}

std::vector<CandidateScore> BaselineScorer::score_answers(const DialogSnippet& snippet) const {
  if (snippet.candidates.empty()) throw EmptyCandidates();
  const EmbeddingVector q = embed(snippet.query.text);
  std::vector<CandidateScore> out;
  out.reserve(snippet.candidates.size());
  for (std::size_t k = 0; k < snippet.candidates.size(); ++k) {
    const EmbeddingVector a = embed(snippet.followers.at(snippet.candidates[k]).text);
    const double score = std::clamp(0.5 * (1.0 + cosine(q, a)), 0.0, 1.0);
    out.push_back({k, score});
  }
  return out;
}

EmbeddingVector BaselineScorer::embed(std::string_view text) const {
  return hashed_ngram_embedding(text, config().embedding_dim);
}

double BaselineScorer::relevance(std::string_view a, std::string_view b) const {
  return cosine(embed(a), embed(b));
}

namespace {

double unit_value(const nlohmann::json& j, const char* key, const std::string& url) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
    throw RemoteUnavailable(url, std::string("malformed response: missing numeric '") + key + "'");
  }
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw RemoteUnavailable(url, std::string("malformed response: '") + key + "' outside [0,1]");
  }
  return v;
}

nlohmann::json utterance_json(const Utterance& u) {
  return {{"speaker", to_string(u.speaker)}, {"text", u.text}};
}

}  // namespace

RemoteScorer::RemoteScorer(ScorerConfig config)
    : Scorer(std::move(config)), client_(this->config().remote_url.value_or("")) {
  this->config().validate();
}

LabelScores RemoteScorer::score_question(std::string_view utterance_text) const {
  const auto res = client_.post("/v1/question_labels", {{"text", utterance_text}});
  return LabelScores{unit_value(res, "semantic_integrity", client_.base_url()),
                     unit_value(res, "not_chitchat", client_.base_url()),
                     unit_value(res, "legal_inquiry", client_.base_url())};
}

std::vector<CandidateScore> RemoteScorer::score_answers(const DialogSnippet& snippet) const {
  if (snippet.candidates.empty()) throw EmptyCandidates();
  nlohmann::json followers = nlohmann::json::array();
  for (const Utterance& u : snippet.followers) followers.push_back(utterance_json(u));
  const nlohmann::json body = {{"query", utterance_json(snippet.query)},
                               {"followers", std::move(followers)},
                               {"candidates", snippet.candidates}};
  const auto res = client_.post("/v1/answer_scores", body);
  if (!res.is_object() || !res.contains("scores") || !res.at("scores").is_array() ||
      res.at("scores").size() != snippet.candidates.size()) {
    throw RemoteUnavailable(client_.base_url(), "malformed response: 'scores' must have one entry per candidate");
  }
  std::vector<CandidateScore> out;
  out.reserve(snippet.candidates.size());
  for (std::size_t k = 0; k < snippet.candidates.size(); ++k) {
    const auto& v = res.at("scores").at(k);
    if (!v.is_number()) throw RemoteUnavailable(client_.base_url(), "malformed response: non-numeric score");
    const double s = v.get<double>();
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw RemoteUnavailable(client_.base_url(), "malformed response: score outside [0,1]");
    }
    out.push_back({k, s});
  }
  return out;
}

EmbeddingVector RemoteScorer::embed(std::string_view text) const {
  const auto res = client_.post("/v1/embed", {{"text", text}});
  if (!res.is_object() || !res.contains("vector") || !res.at("vector").is_array() ||
      res.at("vector").empty()) {
    throw RemoteUnavailable(client_.base_url(), "malformed response: missing 'vector'");
  }
  EmbeddingVector v;
  v.values.reserve(res.at("vector").size());
  for (const auto& x : res.at("vector")) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) {
      throw RemoteUnavailable(client_.base_url(), "malformed response: non-finite vector entry");
    }
    v.values.push_back(x.get<double>());
  }
  normalize_in_place(v);
  return v;
}

double RemoteScorer::relevance(std::string_view a, std::string_view b) const {
  const auto res = client_.post("/v1/pair_score", {{"text_a", a}, {"text_b", b}});
  return 2.0 * unit_value(res, "score", client_.base_url()) - 1.0;
}

std::shared_ptr<const Scorer> make_scorer(const ScorerConfig& config) {
  config.validate();
  if (config.backend == ScorerBackend::Remote) return std::make_shared<RemoteScorer>(config);
  return std::make_shared<BaselineScorer>(config);
}

}  // namespace salesmine
