#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "salesmine/clustering.hpp"
#include "salesmine/phrase_mining.hpp"
#include "salesmine/scoring.hpp"
#include "salesmine/search_index.hpp"

using namespace salesmine;

namespace {

std::vector<EmbeddingVector> unit_vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<EmbeddingVector> out(n);
  for (auto& v : out) {
    v.values.resize(dim);
    for (double& x : v.values) x = g(rng);
    normalize_in_place(v);
  }
  return out;
}

std::vector<TokenSeq> token_corpus(std::size_t sentences, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> w;
  for (int i = 1; i <= 500; ++i) w.push_back(1.0 / i);
  std::discrete_distribution<int> word(w.begin(), w.end());
  std::uniform_int_distribution<int> len(4, 16);
  std::vector<TokenSeq> out(sentences);
  for (auto& s : out) {
    for (int i = 0, n = len(rng); i < n; ++i) s.push_back("w" + std::to_string(word(rng)));
  }
  return out;
}

void BM_Embed(benchmark::State& state) {
  const BaselineScorer scorer{ScorerConfig{}};
  const std::string text = "I think it's too expensive for me right now, can I pay by installments?";
  for (auto _ : state) benchmark::DoNotOptimize(scorer.embed(text));
}
BENCHMARK(BM_Embed);

void BM_KMeans(benchmark::State& state) {
  const auto points = unit_vectors(static_cast<std::size_t>(state.range(0)), 256, 1);
  const std::size_t k = choose_k(points.size());
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(points, k, 42));
}
BENCHMARK(BM_KMeans)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_SearchTopK(benchmark::State& state) {
  const auto vectors = unit_vectors(static_cast<std::size_t>(state.range(0)), 256, 2);
  std::vector<IndexEntry> entries(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    entries[i].entry_id = i;
    entries[i].vector = vectors[i];
  }
  const SearchIndex index(std::move(entries));
  const auto query = unit_vectors(1, 256, 3).front();
  for (auto _ : state) benchmark::DoNotOptimize(index.top_k(query, 10));
}
BENCHMARK(BM_SearchTopK)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_MinePhrases(benchmark::State& state) {
  const auto corpus = token_corpus(static_cast<std::size_t>(state.range(0)), 4);
  MiningConfig cfg;
  for (auto _ : state) {
    const PhraseTable table = mine_frequent_phrases(corpus, cfg);
    std::size_t segments = 0;
    for (const auto& s : corpus) segments += segment(s, table, cfg).size();
    benchmark::DoNotOptimize(segments);
  }
}
BENCHMARK(BM_MinePhrases)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
