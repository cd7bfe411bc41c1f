#include "salesmine/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "salesmine/text.hpp"

namespace salesmine {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

namespace {

void check_inputs(std::span<const EmbeddingVector> vectors, std::size_t k) {
  if (k < 1 || k > vectors.size()) {
    throw KMeansError(KMeansError::Kind::BadK,
                      "k=" + std::to_string(k) + " outside [1, " + std::to_string(vectors.size()) + "]");
  }
  const std::size_t dim = vectors.front().dim();
  for (const auto& v : vectors) {
    if (v.dim() != dim) {
      throw KMeansError(KMeansError::Kind::DimensionMismatch,
                        "vector of dimension " + std::to_string(v.dim()) + ", expected " + std::to_string(dim));
    }
  }
}

// Nearest centroid with ties to the lowest index.
std::size_t nearest(std::span<const double> p, const std::vector<EmbeddingVector>& centroids, double& best_d2) {
  std::size_t best = 0;
  best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d2 = squared_distance(p, centroids[c].values);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

double assign(std::span<const EmbeddingVector> vectors, const std::vector<EmbeddingVector>& centroids,
              std::vector<std::size_t>& assignments, std::vector<double>& d2) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    assignments[i] = nearest(vectors[i].values, centroids, d2[i]);
    inertia += d2[i];
  }
  return inertia;
}

}  // namespace

std::vector<EmbeddingVector> kmeans_plus_plus(std::span<const EmbeddingVector> vectors, std::size_t k,
                                              std::uint64_t seed) {
  check_inputs(vectors, k);
  const std::size_t n = vectors.size();
  SplitMix64 rng(seed);
  auto uniform_index = [&] { return std::min(n - 1, static_cast<std::size_t>(rng.next_unit() * static_cast<double>(n))); };

  std::vector<EmbeddingVector> centroids;
  centroids.reserve(k);
  centroids.push_back(vectors[uniform_index()]);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(vectors[i].values, centroids[0].values);

  while (centroids.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick;
    if (!(total > 0.0)) {
      pick = uniform_index();
    } else {
      const double target = rng.next_unit() * total;
      double cum = 0.0;
      pick = n;
      std::size_t last_positive = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] > 0.0) last_positive = i;
        cum += d2[i];
        if (cum > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    }
    centroids.push_back(vectors[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(vectors[i].values, centroids.back().values));
    }
  }
  return centroids;
}

KMeansResult lloyd(std::span<const EmbeddingVector> vectors, std::vector<EmbeddingVector> centroids,
                   const KMeansOptions& options) {
  const std::size_t n = vectors.size();
  const std::size_t k = centroids.size();
  const std::size_t dim = vectors.empty() ? 0 : vectors.front().dim();

  KMeansResult result;
  result.assignments.assign(n, 0);
  std::vector<double> d2(n, 0.0);

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    result.inertia_history.push_back(assign(vectors, centroids, result.assignments, d2));

    std::vector<EmbeddingVector> next(k, EmbeddingVector{std::vector<double>(dim, 0.0)});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& sum = next[result.assignments[i]].values;
      for (std::size_t j = 0; j < dim; ++j) sum[j] += vectors[i].values[j];
      ++counts[result.assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (double& x : next[c].values) x /= static_cast<double>(counts[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (d2[i] > d2[far]) far = i;
      }
      next[c] = vectors[far];
      d2[far] = 0.0;
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(centroids[c].values, next[c].values)));
    }
    centroids = std::move(next);
    result.iterations = iter + 1;
    if (shift < options.tolerance) break;
  }

  result.inertia_history.push_back(assign(vectors, centroids, result.assignments, d2));
  result.centroids = std::move(centroids);
  return result;
}

KMeansResult kmeans(std::span<const EmbeddingVector> vectors, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (vectors.empty()) throw KMeansError(KMeansError::Kind::BadK, "k-means needs at least one vector");
  return lloyd(vectors, kmeans_plus_plus(vectors, k, seed), options);
}

std::size_t choose_k(std::size_t n, std::optional<std::size_t> override_k) {
  if (n == 0) return 0;
  if (override_k) return std::clamp<std::size_t>(*override_k, 1, n);
  if (n == 1) return 1;
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n) / 2.0)));
  return std::min(std::clamp<std::size_t>(k, 2, 50), n);
}

std::vector<Utterance> filter_trivial(std::span<const Utterance> utterances, const Scorer& scorer) {
  std::vector<Utterance> out;
  for (const Utterance& u : utterances) {
    if (u.speaker != Speaker::Customer) continue;
    if (text::tokenize(u.text).size() < 2) continue;
    if (scorer.score_question(u.text).not_chitchat < scorer.config().per_label_threshold) continue;
    out.push_back(u);
  }
  return out;
}

std::vector<Utterance> customer_utterances(const Chatlog& chatlog) {
  std::vector<Utterance> out;
  for (const Dialog& d : chatlog.dialogs) {
    for (const Utterance& u : d.utterances) {
      if (u.speaker == Speaker::Customer) out.push_back(u);
    }
  }
  return out;
}

bool cluster_order(const Cluster& a, const Cluster& b) {
  if (a.frequency != b.frequency) return a.frequency > b.frequency;
  if (a.mean_relevance != b.mean_relevance) return a.mean_relevance > b.mean_relevance;
  return a.cluster_id < b.cluster_id;
}

std::vector<Cluster> build_clusters(std::span<const Utterance> utterances, std::span<const Dialog> dialogs,
                                    const Scorer& scorer, const ClusteringConfig& config) {
  const std::vector<Utterance> kept = filter_trivial(utterances, scorer);
  if (kept.empty()) return {};

  std::vector<EmbeddingVector> vectors;
  vectors.reserve(kept.size());
  for (const Utterance& u : kept) vectors.push_back(scorer.embed(u.text));

  const std::size_t k = choose_k(kept.size(), config.k);
  const KMeansResult km = kmeans(vectors, k, config.seed);

  std::unordered_map<std::string_view, const Dialog*> by_id;
  for (const Dialog& d : dialogs) by_id.emplace(d.dialog_id, &d);

  auto responses_after = [&](const Utterance& u) {
    std::vector<UtteranceRef> out;
    auto it = by_id.find(u.dialog_id);
    if (it == by_id.end()) return out;
    const auto& turns = it->second->utterances;
    for (std::size_t i = u.turn_index + 1; i < turns.size() && turns[i].speaker == Speaker::Sales; ++i) {
      out.push_back({turns[i].dialog_id, turns[i].turn_index, turns[i].text});
    }
    return out;
  };

  std::vector<Cluster> clusters;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (km.assignments[i] == c) idx.push_back(i);
    }
    if (idx.empty()) continue;

    std::size_t anchor = idx.front();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : idx) {
      const double d2 = squared_distance(vectors[i].values, km.centroids[c].values);
      if (d2 < best) {
        best = d2;
        anchor = i;
      }
    }

    Cluster cluster;
    cluster.cluster_id = c;
    cluster.centroid = km.centroids[c];
    cluster.anchor_text = kept[anchor].text;
    double relevance_sum = 0.0;
    for (std::size_t i : idx) {
      const double rel = i == anchor ? 1.0 : scorer.relevance(cluster.anchor_text, kept[i].text);
      if (i != anchor && rel < config.relevance_threshold) continue;
      ClusterMember m;
      m.dialog_id = kept[i].dialog_id;
      m.turn_index = kept[i].turn_index;
      m.text = kept[i].text;
      m.vector = vectors[i];
      m.anchor_relevance = rel;
      m.responses = responses_after(kept[i]);
      relevance_sum += rel;
      cluster.members.push_back(std::move(m));
    }
    cluster.frequency = cluster.members.size();
    cluster.mean_relevance = relevance_sum / static_cast<double>(cluster.frequency);
    clusters.push_back(std::move(cluster));
  }
  std::sort(clusters.begin(), clusters.end(), cluster_order);
  return clusters;
}

}  // namespace salesmine
