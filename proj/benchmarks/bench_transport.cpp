#include <random>

#include <benchmark/benchmark.h>

#include "flatspace/assignment.hpp"
#include "flatspace/transport.hpp"

using namespace flatspace;

namespace {

Eigen::MatrixXd random_costs(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd c(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) c(i, j) = u(rng);
  return c;
}

std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> w(n);
  double s = 0;
  for (auto& x : w) s += (x = u(rng));
  for (auto& x : w) x /= s;
  return w;
}

void BM_Assignment(benchmark::State& state) {
  const auto n = state.range(0);
  const auto c = random_costs(n, n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(c).cost);
  state.SetComplexityN(n);
}
BENCHMARK(BM_Assignment)->RangeMultiplier(2)->Range(8, 512)->Complexity(benchmark::oNCubed);

void BM_TransportationSimplex(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(8);
  const auto mu = random_weights(n, rng), nu = random_weights(n, rng);
  const auto c = random_costs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), 9);
  std::size_t pivots = 0;
  for (auto _ : state) {
    auto plan = solve_transportation(mu, nu, c);
    pivots = plan.pivots;
    benchmark::DoNotOptimize(plan.cost);
  }
  state.counters["pivots"] = static_cast<double>(pivots);
}
BENCHMARK(BM_TransportationSimplex)->RangeMultiplier(2)->Range(8, 256);

void BM_IvanovW2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  TuplePoint<Eigen::VectorXd> x, y;
  for (std::size_t k = 0; k < n; ++k) {
    x.push_back(Eigen::Vector2d(g(rng), g(rng)));
    y.push_back(Eigen::Vector2d(g(rng), g(rng)));
  }
  const auto mx = ivanov_embed(x), my = ivanov_embed(y);
  for (auto _ : state) benchmark::DoNotOptimize(w2_discrete(mx, my, euclidean_distance).distance);
}
BENCHMARK(BM_IvanovW2)->RangeMultiplier(2)->Range(4, 128);

}  // namespace
