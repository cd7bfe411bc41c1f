#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "salesmine/embedding.hpp"
#include "salesmine/error.hpp"
#include "salesmine/remote_client.hpp"
#include "salesmine/snippet.hpp"

namespace salesmine {

// Three-aspect question gate. A customer message counts as a question
// only when every aspect clears the per-label threshold.
struct LabelScores {
  double semantic_integrity = 0.0;
  double not_chitchat = 0.0;
  double legal_inquiry = 0.0;

  friend bool operator==(const LabelScores&, const LabelScores&) = default;
};

struct Lexicons {
  std::vector<std::string> greetings;
  std::vector<std::string> interrogatives;
  std::vector<std::string> domain_terms;
};

// Built-in English/Chinese lexicons used when no files are configured.
Lexicons default_lexicons();

// One entry per line, UTF-8. Blank lines and lines starting with '#' are
// skipped.
std::vector<std::string> load_lexicon_file(const std::filesystem::path& path);

enum class ScorerBackend : std::uint8_t { Baseline, Remote };

struct ScorerConfig {
  ScorerBackend backend = ScorerBackend::Baseline;
  std::optional<std::string> remote_url;
  double per_label_threshold = 0.5;
  double answer_threshold = 0.75;
  std::size_t embedding_dim = kDefaultEmbeddingDim;
  Lexicons lexicons = default_lexicons();

  // Throws ConfigError when thresholds leave [0,1] or Remote has no url.
  void validate() const;
};

struct CandidateScore {
  std::size_t candidate_index;  // position inside DialogSnippet::candidates
  double score;                 // [0,1]

  friend bool operator==(const CandidateScore&, const CandidateScore&) = default;
};

class EmptyCandidates : public Error {
 public:
  EmptyCandidates() : Error("dialog snippet has no candidate answers") {}
};

// Every learned-model dependency of the pipelines. Implementations are
// immutable after construction and safe to share across threads.
class Scorer {
 public:
  explicit Scorer(ScorerConfig config) : config_(std::move(config)) {}
  virtual ~Scorer() = default;

  Scorer(const Scorer&) = delete;
  Scorer& operator=(const Scorer&) = delete;

  virtual LabelScores score_question(std::string_view utterance_text) const = 0;

  // One score per candidate, in candidate order. Throws EmptyCandidates.
  virtual std::vector<CandidateScore> score_answers(const DialogSnippet& snippet) const = 0;

  virtual EmbeddingVector embed(std::string_view text) const = 0;

  // Pair relevance on [-1,1].
  virtual double relevance(std::string_view a, std::string_view b) const = 0;

  const ScorerConfig& config() const noexcept { return config_; }

 private:
  ScorerConfig config_;
};

bool is_valid_question(const LabelScores& scores, const ScorerConfig& config);

// Hashed character n-gram embedder (n = 1..3 over codepoints of the
// normalized text, FNV-1a-64 bucketing, L2 normalized). Platform
// independent and bit-reproducible.
EmbeddingVector hashed_ngram_embedding(std::string_view text, std::size_t dim = kDefaultEmbeddingDim);

class BaselineScorer final : public Scorer {
 public:
  explicit BaselineScorer(ScorerConfig config);

  LabelScores score_question(std::string_view utterance_text) const override;
  std::vector<CandidateScore> score_answers(const DialogSnippet& snippet) const override;
  EmbeddingVector embed(std::string_view text) const override;
  double relevance(std::string_view a, std::string_view b) const override;

 private:
  std::unordered_set<std::string> greeting_keys_;
  std::vector<std::vector<std::string>> interrogative_tokens_;
};

// Client for a model service implementing /v1/question_labels,
// /v1/answer_scores, /v1/embed and /v1/pair_score (schemas in
// docs/remote_model_api.md).
class RemoteScorer final : public Scorer {
 public:
  explicit RemoteScorer(ScorerConfig config);

  LabelScores score_question(std::string_view utterance_text) const override;
  std::vector<CandidateScore> score_answers(const DialogSnippet& snippet) const override;
  EmbeddingVector embed(std::string_view text) const override;
  double relevance(std::string_view a, std::string_view b) const override;

 private:
  RemoteModelClient client_;
};

std::shared_ptr<const Scorer> make_scorer(const ScorerConfig& config);

}  // namespace salesmine
