#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "flatspace/tower.hpp"

using namespace flatspace;

namespace {

TowerConfig circle_tower(int depth, std::size_t q, unsigned jobs) {
  TowerConfig c;
  c.group = GroupSpec::circle(2 * std::numbers::pi);
  c.depth = depth;
  c.net_sizes.assign(static_cast<std::size_t>(depth), q);
  c.level_diagnostics = false;
  c.jobs = jobs;
  return c;
}

std::vector<GroupElement> quarter_points() {
  std::vector<GroupElement> pts;
  for (int k = 0; k < 4; ++k) pts.emplace_back(std::vector<double>{k * std::numbers::pi / 2});
  return pts;
}

// args: per-level net size, jobs
void BM_CirclePipelineDepth2(benchmark::State& state) {
  const auto c = circle_tower(2, static_cast<std::size_t>(state.range(0)), static_cast<unsigned>(state.range(1)));
  const auto pts = quarter_points();
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(pts, c).distortion);
  state.counters["final_atoms"] = static_cast<double>(state.range(0) * state.range(0));
}
BENCHMARK(BM_CirclePipelineDepth2)->Args({4, 1})->Args({8, 1})->Args({16, 1})->Args({16, 4})->Unit(benchmark::kMillisecond);

void BM_SU2Lift(benchmark::State& state) {
  TowerConfig c;
  c.group = GroupSpec::su2();
  c.depth = 2;
  c.net_sizes = {static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0))};
  const std::vector<LevelNet> nets{level_net(c, 0), level_net(c, 1)};
  std::mt19937_64 rng(11);
  const auto x = random_element(c.group, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lift_delta(x, c, nets).back().atoms.size());
}
BENCHMARK(BM_SU2Lift)->Arg(8)->Arg(24)->Arg(40);

void BM_AbelianCosetRoute(benchmark::State& state) {
  const auto c = circle_tower(4, static_cast<std::size_t>(state.range(0)), 1);
  const GroupElement x(std::vector<double>{0.0}), y(std::vector<double>{std::numbers::pi});
  for (auto _ : state) benchmark::DoNotOptimize(abelian_lift_distance(x, y, c));
}
BENCHMARK(BM_AbelianCosetRoute)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
