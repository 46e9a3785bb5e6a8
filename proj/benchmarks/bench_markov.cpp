#include <benchmark/benchmark.h>

#include "flatspace/markov.hpp"

using namespace flatspace;

namespace {

void BM_MarkovRatios(benchmark::State& state) {
  SamplerOptions o;
  o.min_states = o.max_states = static_cast<std::size_t>(state.range(0));
  const auto cfg = make_sampler(o)(3);
  for (auto _ : state) benchmark::DoNotOptimize(markov_ratios(cfg, 10));
}
BENCHMARK(BM_MarkovRatios)->Arg(2)->Arg(6)->Arg(16)->Arg(64);

void BM_VerifySphere(benchmark::State& state) {
  const auto sampler = make_sampler({});
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_markov_type2(sampler, 100, 10, 1.0, 1, static_cast<unsigned>(state.range(0))).max_ratio);
}
BENCHMARK(BM_VerifySphere)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
