#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace salesmine {

using TokenSeq = std::vector<std::string>;

struct Phrase {
  TokenSeq tokens;
  std::uint64_t support = 0;
  // Merge significance that produced this phrase during segmentation; 0
  // for single tokens and for freshly mined phrases.
  double significance = 0.0;

  friend bool operator==(const Phrase&, const Phrase&) = default;
};

struct MiningConfig {
  std::uint64_t min_support = 3;       // sigma
  double significance_threshold = 2.0;  // alpha
  std::size_t max_phrase_len = 6;
  std::size_t max_keywords = 5;

  void validate() const;
};

// Frequent contiguous phrases of a corpus plus the raw unigram counts
// that segmentation needs for tokens below min_support.
class PhraseTable {
 public:
  // Support of a frequent phrase, 0 when the phrase is not frequent.
  std::uint64_t support(std::span<const std::string> tokens) const;
  // Count of a single token, frequent or not.
  std::uint64_t unigram_count(std::string_view token) const;
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  std::size_t size() const noexcept { return phrases_.size(); }
  std::size_t max_phrase_len() const noexcept { return max_phrase_len_; }

  // Sorted by token sequence.
  std::vector<Phrase> phrases() const;

 private:
  friend PhraseTable mine_frequent_phrases(std::span<const TokenSeq> corpus, const MiningConfig& config);

  std::map<TokenSeq, std::uint64_t, std::less<>> phrases_;
  std::map<std::string, std::uint64_t, std::less<>> unigrams_;
  std::uint64_t total_tokens_ = 0;
  std::size_t max_phrase_len_ = 0;
};

// Text tokenizer shared with the scorers (see text::tokenize).
TokenSeq tokenize(std::string_view text);

// Apriori pattern growth: a length-L window is counted only when both of
// its length-(L-1) sub-windows are frequent. Overlapping occurrences
// count, so "a a a" holds ("a","a") twice.
PhraseTable mine_frequent_phrases(std::span<const TokenSeq> corpus, const MiningConfig& config);

// (f12 - f1*f2/L) / sqrt(max(f12, 1)): observed collocation count against
// its expectation under independence, in standard-deviation units.
double significance(std::uint64_t support_left, std::uint64_t support_right, std::uint64_t joint_support,
                    std::uint64_t total_tokens);

// Bottom-up agglomerative segmentation: merge the adjacent pair with the
// highest significance (leftmost on ties) while it is >= alpha and the
// merged phrase is frequent. Output concatenates back to `tokens`.
std::vector<Phrase> segment(std::span<const std::string> tokens, const PhraseTable& table,
                            const MiningConfig& config);

// Top keywords for one cluster of texts. Phrases are scored
// support * max(significance, 1); phrases at least as frequent (per token)
// in the background corpus as in the cluster are ranked after all others.
std::vector<std::string> cluster_keywords(std::span<const std::string> cluster_texts,
                                          std::span<const std::string> background_texts,
                                          const MiningConfig& config);

}  // namespace salesmine
