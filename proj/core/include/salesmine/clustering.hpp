#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salesmine/embedding.hpp"
#include "salesmine/error.hpp"
#include "salesmine/ingest.hpp"
#include "salesmine/scoring.hpp"

namespace salesmine {

// splitmix64 generator. Small, seedable, identical output everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

class KMeansError : public Error {
 public:
  enum class Kind : std::uint8_t { BadK, DimensionMismatch };
  KMeansError(Kind kind, std::string what) : Error(std::move(what)), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct KMeansOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;  // stop once the largest centroid shift drops below this
};

struct KMeansResult {
  std::vector<std::size_t> assignments;
  std::vector<EmbeddingVector> centroids;
  // Inertia after every assignment step, final assignment included.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;

  double inertia() const { return inertia_history.empty() ? 0.0 : inertia_history.back(); }
};

double squared_distance(std::span<const double> a, std::span<const double> b);

// k-means++ seeding driven by SplitMix64(seed).
std::vector<EmbeddingVector> kmeans_plus_plus(std::span<const EmbeddingVector> vectors, std::size_t k,
                                              std::uint64_t seed);

// Lloyd iterations from the given centroids. Ties go to the lowest
// centroid index; an empty cluster is re-seeded with the point farthest
// from its own centroid.
KMeansResult lloyd(std::span<const EmbeddingVector> vectors, std::vector<EmbeddingVector> centroids,
                   const KMeansOptions& options = {});

// Throws KMeansError (BadK unless 1 <= k <= n, DimensionMismatch).
KMeansResult kmeans(std::span<const EmbeddingVector> vectors, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

// override clamped to [1, n]; otherwise clamp(round(sqrt(n/2)), 2, 50),
// and 1 for a single point. Returns 0 for n == 0.
std::size_t choose_k(std::size_t n, std::optional<std::size_t> override_k = std::nullopt);

struct UtteranceRef {
  std::string dialog_id;
  std::size_t turn_index = 0;
  std::string text;

  friend bool operator==(const UtteranceRef&, const UtteranceRef&) = default;
};

struct ClusterMember {
  std::string dialog_id;
  std::size_t turn_index = 0;
  std::string text;
  EmbeddingVector vector;
  double anchor_relevance = 0.0;
  // Consecutive Sales turns right after this message, up to the next
  // Customer turn.
  std::vector<UtteranceRef> responses;
};

struct Cluster {
  std::size_t cluster_id = 0;
  EmbeddingVector centroid;
  std::string anchor_text;
  std::vector<ClusterMember> members;
  std::size_t frequency = 0;
  double mean_relevance = 0.0;
  std::vector<std::string> keywords;
};

struct ClusteringConfig {
  std::optional<std::size_t> k;
  std::uint64_t seed = 42;
  double relevance_threshold = 0.6;  // members below this relevance to the anchor are dropped
};

// Customer turns that are not chitchat and have at least two tokens.
std::vector<Utterance> filter_trivial(std::span<const Utterance> utterances, const Scorer& scorer);

// Every Customer utterance of the chatlog, in dialog order.
std::vector<Utterance> customer_utterances(const Chatlog& chatlog);

// filter -> embed -> k-means -> anchor + relevance filter -> responses.
// Clusters come back ordered by (frequency desc, mean_relevance desc,
// cluster_id asc); keywords are left empty.
std::vector<Cluster> build_clusters(std::span<const Utterance> utterances, std::span<const Dialog> dialogs,
                                    const Scorer& scorer, const ClusteringConfig& config);

bool cluster_order(const Cluster& a, const Cluster& b);

}  // namespace salesmine
