#include <benchmark/benchmark.h>

#include "lacogsea/autoencoder.hpp"
#include "lacogsea/correlation.hpp"
#include "lacogsea/gsea.hpp"
#include "lacogsea/parallel.hpp"
#include "lacogsea/pathway_ranking.hpp"
#include "lacogsea/random.hpp"

using namespace lacogsea;

namespace {

LatentMatrix random_latent(const ExpressionMatrix& m, int d, std::uint64_t seed) {
  Rng rng(seed);
  LatentMatrix z;
  z.sample_ids = m.sample_ids;
  z.values.resize(m.samples(), d);
  for (Eigen::Index i = 0; i < z.values.size(); ++i) z.values.data()[i] = rng.normal();
  return z;
}

RankedGeneList random_list(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RankedGene> genes;
  for (int i = 0; i < n; ++i) genes.push_back({"g" + std::to_string(i), rng.normal()});
  return make_ranked_list(0, std::move(genes));
}

void BM_GeneDimensionCorrelation(benchmark::State& state) {
  set_thread_count(1);
  const auto m = gaussian_noise_matrix(static_cast<int>(state.range(0)), 300, 1);
  const auto z = random_latent(m, 16, 2);
  for (auto _ : state) benchmark::DoNotOptimize(gene_dimension_correlation(m, z));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 16);
}
BENCHMARK(BM_GeneDimensionCorrelation)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_EnrichmentScore(benchmark::State& state) {
  const auto l = random_list(20000, 3);
  const auto w = list_weights(l, 1.0);
  Rng rng(4);
  std::vector<std::size_t> hits;
  std::vector<unsigned char> marks;
  rng.sample_distinct(w.size(), static_cast<std::size_t>(state.range(0)), hits, marks);
  std::sort(hits.begin(), hits.end());
  for (auto _ : state) benchmark::DoNotOptimize(running_sum_es_value(w, hits));
}
BENCHMARK(BM_EnrichmentScore)->Arg(15)->Arg(100)->Arg(500);

void BM_PermutationNull(benchmark::State& state) {
  const auto l = random_list(static_cast<int>(state.range(0)), 5);
  const auto w = list_weights(l, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(permutation_null(w, 30, 6, 1000));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_PermutationNull)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_AutoencoderStep(benchmark::State& state) {
  const auto m = gaussian_noise_matrix(2000, 128, 7);
  AutoencoderConfig cfg;
  cfg.latent_dim = 16;
  const auto model = initialize_autoencoder(m.gene_ids, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(model, m.values));
}
BENCHMARK(BM_AutoencoderStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
