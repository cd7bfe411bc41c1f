#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salesmine/clustering.hpp"
#include "salesmine/embedding.hpp"
#include "salesmine/error.hpp"
#include "salesmine/scoring.hpp"

namespace salesmine {

// One (customer message, sales response) pair, keyed by the embedding of
// the customer message.
struct IndexEntry {
  std::size_t entry_id = 0;
  std::string response_text;
  std::string customer_query_text;
  std::size_t cluster_id = 0;
  EmbeddingVector vector;
};

struct SearchHit {
  std::size_t entry_id = 0;
  double score = 0.0;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

class EmptyQuery : public Error {
 public:
  EmptyQuery() : Error("search query is empty") {}
};

// Exact flat index. Immutable after construction.
class SearchIndex {
 public:
  SearchIndex() = default;
  explicit SearchIndex(std::vector<IndexEntry> entries);

  std::span<const IndexEntry> entries() const noexcept { return entries_; }
  const IndexEntry& entry(std::size_t id) const { return entries_.at(id); }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Top-k by cosine against a ready query vector; ties to the lowest id.
  std::vector<SearchHit> top_k(const EmbeddingVector& query, std::size_t k) const;

 private:
  std::vector<IndexEntry> entries_;
};

// One entry per (member, response) in cluster order.
SearchIndex build_index(std::span<const Cluster> clusters, const Scorer& scorer);

// Throws EmptyQuery for blank queries and std::invalid_argument for top_k == 0.
std::vector<SearchHit> search(const SearchIndex& index, std::string_view query, std::size_t top_k,
                              const Scorer& scorer);

}  // namespace salesmine
