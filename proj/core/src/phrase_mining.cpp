#include "salesmine/phrase_mining.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "salesmine/error.hpp"
#include "salesmine/text.hpp"

namespace salesmine {

void MiningConfig::validate() const {
  if (min_support < 1) throw ConfigError("min_support must be >= 1");
  if (max_phrase_len < 2) throw ConfigError("max_phrase_len must be >= 2");
}

std::uint64_t PhraseTable::support(std::span<const std::string> tokens) const {
  if (tokens.empty()) return 0;
  // Heterogeneous lookup would need a span-aware comparator; phrases are
  // short so a copy is fine.
  auto it = phrases_.find(TokenSeq(tokens.begin(), tokens.end()));
  return it == phrases_.end() ? 0 : it->second;
}

std::uint64_t PhraseTable::unigram_count(std::string_view token) const {
  auto it = unigrams_.find(token);
  return it == unigrams_.end() ? 0 : it->second;
}

std::vector<Phrase> PhraseTable::phrases() const {
  std::vector<Phrase> out;
  out.reserve(phrases_.size());
  for (const auto& [tokens, count] : phrases_) out.push_back(Phrase{tokens, count, 0.0});
  return out;
}

TokenSeq tokenize(std::string_view text) { return text::tokenize(text); }

PhraseTable mine_frequent_phrases(std::span<const TokenSeq> corpus, const MiningConfig& config) {
  config.validate();
  PhraseTable table;
  table.max_phrase_len_ = config.max_phrase_len;

  for (const TokenSeq& doc : corpus) {
    table.total_tokens_ += doc.size();
    for (const std::string& t : doc) ++table.unigrams_[t];
  }

  // active[d][i]: the window of the current length starting at i is frequent.
  std::vector<std::vector<char>> active(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    active[d].assign(corpus[d].size(), 0);
    for (std::size_t i = 0; i < corpus[d].size(); ++i) {
      const auto count = table.unigrams_.find(corpus[d][i])->second;
      if (count >= config.min_support) {
        active[d][i] = 1;
        table.phrases_.emplace(TokenSeq{corpus[d][i]}, count);
      }
    }
  }

  for (std::size_t len = 2; len <= config.max_phrase_len; ++len) {
    std::map<TokenSeq, std::uint64_t> counts;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      const TokenSeq& doc = corpus[d];
      for (std::size_t i = 0; i + len <= doc.size(); ++i) {
        if (active[d][i] && active[d][i + 1]) {
          ++counts[TokenSeq(doc.begin() + static_cast<std::ptrdiff_t>(i),
                            doc.begin() + static_cast<std::ptrdiff_t>(i + len))];
        }
      }
    }
    bool any = false;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      const TokenSeq& doc = corpus[d];
      std::vector<char> next(doc.size(), 0);
      for (std::size_t i = 0; i + len <= doc.size(); ++i) {
        if (!(active[d][i] && active[d][i + 1])) continue;
        auto it = counts.find(TokenSeq(doc.begin() + static_cast<std::ptrdiff_t>(i),
                                       doc.begin() + static_cast<std::ptrdiff_t>(i + len)));
        if (it->second >= config.min_support) {
          next[i] = 1;
          any = true;
        }
      }
      active[d] = std::move(next);
    }
    for (auto& [tokens, count] : counts) {
      if (count >= config.min_support) table.phrases_.emplace(tokens, count);
    }
    if (!any) break;
  }
  return table;
}

double significance(std::uint64_t support_left, std::uint64_t support_right, std::uint64_t joint_support,
                    std::uint64_t total_tokens) {
  const double expected =
      static_cast<double>(support_left) * static_cast<double>(support_right) / static_cast<double>(total_tokens);
  const double joint = static_cast<double>(joint_support);
  return (joint - expected) / std::sqrt(std::max(joint, 1.0));
}

namespace {

struct Segment {
  std::size_t begin;
  std::size_t end;
  double significance;
};

std::uint64_t segment_support(std::span<const std::string> tokens, const Segment& s, const PhraseTable& table) {
  if (s.end - s.begin == 1) return table.unigram_count(tokens[s.begin]);
  return table.support(tokens.subspan(s.begin, s.end - s.begin));
}

}  // namespace

std::vector<Phrase> segment(std::span<const std::string> tokens, const PhraseTable& table,
                            const MiningConfig& config) {
  std::vector<Segment> segs;
  segs.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) segs.push_back({i, i + 1, 0.0});

  const std::uint64_t total = std::max<std::uint64_t>(table.total_tokens(), 1);
  while (segs.size() > 1) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_i = segs.size();
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
      const std::size_t len = segs[i + 1].end - segs[i].begin;
      if (len > config.max_phrase_len) continue;
      const std::uint64_t joint = table.support(tokens.subspan(segs[i].begin, len));
      if (joint == 0) continue;
      const double sig = significance(segment_support(tokens, segs[i], table),
                                      segment_support(tokens, segs[i + 1], table), joint, total);
      if (sig > best) {
        best = sig;
        best_i = i;
      }
    }
    if (best_i == segs.size() || best < config.significance_threshold) break;
    segs[best_i].end = segs[best_i + 1].end;
    segs[best_i].significance = best;
    segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(best_i + 1));
  }

  std::vector<Phrase> out;
  out.reserve(segs.size());
  for (const Segment& s : segs) {
    out.push_back(Phrase{TokenSeq(tokens.begin() + static_cast<std::ptrdiff_t>(s.begin),
                                  tokens.begin() + static_cast<std::ptrdiff_t>(s.end)),
                         segment_support(tokens, s, table), s.significance});
  }
  return out;
}

std::vector<std::string> cluster_keywords(std::span<const std::string> cluster_texts,
                                          std::span<const std::string> background_texts,
                                          const MiningConfig& config) {
  config.validate();
  std::vector<TokenSeq> docs;
  for (const std::string& t : cluster_texts) {
    if (TokenSeq tokens = tokenize(t); !tokens.empty()) docs.push_back(std::move(tokens));
  }
  if (docs.empty() || config.max_keywords == 0) return {};

  // Small clusters cannot reach the corpus-level support floor.
  MiningConfig local = config;
  local.min_support = std::clamp<std::uint64_t>(config.min_support, 1, docs.size());
  const PhraseTable table = mine_frequent_phrases(docs, local);

  struct Candidate {
    std::uint64_t support = 0;
    double significance = 0.0;
    std::uint64_t background_count = 0;
  };
  std::map<TokenSeq, Candidate> candidates;
  for (const TokenSeq& doc : docs) {
    for (Phrase& p : segment(doc, table, local)) {
      if (p.support < local.min_support) continue;
      auto& c = candidates[p.tokens];
      c.support = p.support;
      c.significance = std::max(c.significance, p.significance);
    }
  }
  if (candidates.empty()) return {};

  std::set<std::size_t> lengths;
  for (const auto& [tokens, c] : candidates) lengths.insert(tokens.size());
  std::uint64_t background_total = 0;
  for (const std::string& t : background_texts) {
    const TokenSeq doc = tokenize(t);
    background_total += doc.size();
    for (std::size_t len : lengths) {
      for (std::size_t i = 0; i + len <= doc.size(); ++i) {
        auto it = candidates.find(TokenSeq(doc.begin() + static_cast<std::ptrdiff_t>(i),
                                           doc.begin() + static_cast<std::ptrdiff_t>(i + len)));
        if (it != candidates.end()) ++it->second.background_count;
      }
    }
  }

  struct Ranked {
    std::string text;
    bool demoted;
    double score;
  };
  std::vector<Ranked> ranked;
  const double cluster_total = static_cast<double>(table.total_tokens());
  for (const auto& [tokens, c] : candidates) {
    const double cluster_rate = static_cast<double>(c.support) / cluster_total;
    const double background_rate =
        background_total == 0 ? 0.0 : static_cast<double>(c.background_count) / static_cast<double>(background_total);
    ranked.push_back({text::join_tokens(tokens), background_rate >= cluster_rate,
                      static_cast<double>(c.support) * std::max(c.significance, 1.0)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.demoted != b.demoted) return !a.demoted;
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });

  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < config.max_keywords; ++i) out.push_back(ranked[i].text);
  return out;
}

}  // namespace salesmine
