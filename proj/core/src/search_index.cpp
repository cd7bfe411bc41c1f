#include "salesmine/search_index.hpp"

#include <algorithm>
#include <stdexcept>

#include "salesmine/text.hpp"

namespace salesmine {

SearchIndex::SearchIndex(std::vector<IndexEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].entry_id != i) throw std::invalid_argument("index entry ids must be dense from 0");
  }
}

std::vector<SearchHit> SearchIndex::top_k(const EmbeddingVector& query, std::size_t k) const {
  std::vector<SearchHit> hits;
  hits.reserve(entries_.size());
  for (const IndexEntry& e : entries_) hits.push_back({e.entry_id, cosine(query, e.vector)});
  const auto better = [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.entry_id < b.entry_id;
  };
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), better);
  hits.resize(n);
  return hits;
}

SearchIndex build_index(std::span<const Cluster> clusters, const Scorer& scorer) {
  std::vector<IndexEntry> entries;
  for (const Cluster& c : clusters) {
    for (const ClusterMember& m : c.members) {
      if (m.responses.empty()) continue;
      const EmbeddingVector v = scorer.embed(m.text);
      for (const UtteranceRef& r : m.responses) {
        entries.push_back(IndexEntry{entries.size(), r.text, m.text, c.cluster_id, v});
      }
    }
  }
  return SearchIndex(std::move(entries));
}

std::vector<SearchHit> search(const SearchIndex& index, std::string_view query, std::size_t top_k,
                              const Scorer& scorer) {
  if (top_k == 0) throw std::invalid_argument("top_k must be >= 1");
  if (text::collapse_whitespace(query).empty()) throw EmptyQuery();
  if (index.empty()) return {};
  return index.top_k(scorer.embed(query), top_k);
}

}  // namespace salesmine
