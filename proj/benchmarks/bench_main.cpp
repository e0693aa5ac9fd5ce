#include <benchmark/benchmark.h>

#include <random>

#include "promptllr/promptllr.hpp"

using namespace promptllr;

namespace {

FeatureSet clusters(std::size_t per_class, std::uint32_t dim) {
  synthetic::ClusterSpec spec;
  spec.classes = 10;
  spec.per_class = per_class;
  spec.dim = dim;
  spec.seed = 1;
  return synthetic::gaussian_clusters(spec);
}

void BM_MaximizeEvidence(benchmark::State& state) {
  const auto fs = clusters(static_cast<std::size_t>(state.range(0)), static_cast<std::uint32_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(maximize_evidence(fs).logme);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(fs.sample_count()));
}
BENCHMARK(BM_MaximizeEvidence)->Args({50, 32})->Args({200, 128})->Args({1350, 512})->Unit(benchmark::kMillisecond);

void BM_ScoreFeatureSets(benchmark::State& state) {
  auto spec = synthetic::ood_domain_spec(3);
  spec.per_class = static_cast<std::size_t>(state.range(0));
  spec.lp_dim = spec.vp_dim = 128;
  spec.prompts = 5;
  const auto domain = synthetic::make_domain(spec);
  for (auto _ : state) benchmark::DoNotOptimize(score_feature_sets(domain.lp, domain.vp).llr);
}
BENCHMARK(BM_ScoreFeatureSets)->Arg(40)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SpectrumProfile(benchmark::State& state) {
  PromptSpec spec;
  spec.height = spec.width = static_cast<std::uint32_t>(state.range(0));
  spec.frame = spec.height / 14;
  const auto prompt = gaussian_prompt(spec, 1.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_profile(prompt).bins.data());
}
BENCHMARK(BM_SpectrumProfile)->Arg(64)->Arg(224)->Unit(benchmark::kMicrosecond);

void BM_KendallTau(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> level(0, 20);
  std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = level(rng);
    y[i] = level(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(x, y));
}
BENCHMARK(BM_KendallTau)->Arg(12)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
