#include <benchmark/benchmark.h>

#include "nproxy/adaptive.hpp"
#include "nproxy/model.hpp"
#include "nproxy/rng.hpp"
#include "nproxy/statdist.hpp"
#include "nproxy/working_mle.hpp"

namespace {

using namespace nproxy;

Dataset sample(std::size_t n, double mu) {
  ModelParams p;
  p.mu = mu;
  p.phi = 0.3;
  p.mu_prime = 2.0;
  p.proxy = ProxySpec::from_label("pos2");
  RngStream rng(17);
  return generate_dataset(p, n, rng);
}

void BM_Philox(benchmark::State& state) {
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
}
BENCHMARK(BM_Philox);

void BM_BetaSample(benchmark::State& state) {
  RngStream rng(2);
  const double a = state.range(0) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(beta_sample(a, 1.25, rng));
}
BENCHMARK(BM_BetaSample)->Arg(1)->Arg(30);

void BM_GenerateDataset(benchmark::State& state) {
  ModelParams p;
  p.mu = 1.0;
  p.phi = 0.3;
  p.mu_prime = 2.0;
  p.proxy = ProxySpec::from_label("hvar");
  RngStream rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_dataset(p, n, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateDataset)->Arg(75)->Arg(5000);

void BM_EmFit(benchmark::State& state) {
  const Dataset d = sample(static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(em_fit(d.y, d.gamma));
}
BENCHMARK(BM_EmFit)->Arg(75)->Arg(5000);

void BM_BootstrapUpperBound(benchmark::State& state) {
  const Dataset d = sample(static_cast<std::size_t>(state.range(0)), 0.0);
  BootstrapConfig c;
  c.rng = RngStream(4);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_upper_bound(d.gamma, *d.y_prime, c));
}
BENCHMARK(BM_BootstrapUpperBound)->Arg(75)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
