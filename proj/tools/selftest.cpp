#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>

#include "commands.hpp"

namespace flatspace::cli {

namespace {

struct Check {
  const char* name;
  std::function<double()> worst;  // largest observed violation
  double tolerance;
};

double assignment_vs_scan(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, 20);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) = u(rng);
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    double best = INFINITY;
    do {
      double s = 0;
      for (int i = 0; i < n; ++i) s += c(i, p[static_cast<std::size_t>(i)]);
      best = std::min(best, s);
    } while (std::next_permutation(p.begin(), p.end()));
    worst = std::max(worst, std::abs(solve_assignment(c).cost - best));
  }
  return worst;
}

double ivanov_isometry(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (std::size_t n : {2u, 3u, 5u}) {
    for (int trial = 0; trial < 10; ++trial) {
      TuplePoint<Eigen::VectorXd> x, y;
      for (std::size_t k = 0; k < n; ++k) {
        x.push_back(Eigen::Vector2d(g(rng), g(rng)));
        y.push_back(Eigen::Vector2d(g(rng), g(rng)));
      }
      const double w = w2_discrete(ivanov_embed(x), ivanov_embed(y), euclidean_distance).distance;
      const double d = perm_quotient_distance(x, y, euclidean_distance) * ivanov_normalisation(n);
      worst = std::max(worst, std::abs(w - d));
    }
  }
  return worst;
}

double bi_invariance(std::mt19937_64& rng) {
  double worst = 0.0;
  for (const auto& G : {GroupSpec::su2(), GroupSpec::torus({1.0, 2.0}),
                        GroupSpec::product({GroupSpec::circle(3.0), GroupSpec::su2(0.5)})}) {
    for (int k = 0; k < 50; ++k) {
      auto a = random_element(G, rng), g = random_element(G, rng), h = random_element(G, rng);
      const double d = geodesic_distance(G, g, h);
      worst = std::max(worst, std::abs(geodesic_distance(G, group_op(G, a, g), group_op(G, a, h)) - d));
      worst = std::max(worst, std::abs(geodesic_distance(G, group_op(G, g, a), group_op(G, h, a)) - d));
    }
  }
  return worst;
}

double embedding_contract(std::mt19937_64& rng) {
  double worst = 0.0;
  for (const auto& G : {GroupSpec::su2(), GroupSpec::torus({1.0, 2.0})}) {
    for (int k = 0; k < 50; ++k) {
      auto g = random_element(G, rng), h = random_element(G, rng);
      const double chord = (nash_embed(G, g) - nash_embed(G, h)).norm();
      worst = std::max(worst, chord - geodesic_distance(G, g, h));
      worst = std::max(worst, geodesic_distance(G, nash_inverse(G, nash_embed(G, g)), g));
    }
  }
  return worst;
}

double projection_roundtrip(std::mt19937_64& rng, unsigned jobs) {
  double worst = 0.0;
  for (const auto& G : {GroupSpec::circle(2 * std::numbers::pi), GroupSpec::su2()}) {
    TowerConfig c;
    c.group = G;
    c.depth = 2;
    c.net_sizes = {8, 8};
    c.jobs = jobs;
    const std::vector<LevelNet> nets{level_net(c, 0), level_net(c, 1)};
    for (int k = 0; k < 3; ++k) {
      const auto x = random_element(G, rng);
      const auto image = embed_level_m(lift_delta(x, c, nets).back(), c);
      for (const auto& p : image.atoms()) worst = std::max(worst, geodesic_distance(G, project_back(p, c), x));
    }
  }
  return worst;
}

double markov_sphere(unsigned jobs) {
  const auto r = verify_markov_type2(make_sampler({}), 30, 10, 1.0, 5, jobs);
  double worst = std::max(0.0, r.max_ratio - 1.0);
  for (const auto& row : r.rows)
    if (row.t == 1 && row.ratio) worst = std::max(worst, std::abs(*row.ratio - 1.0));
  return worst;
}

double orbit_invariance(std::mt19937_64& rng) {
  const auto G = FiniteIsometryGroup::symmetric_group(3);
  std::normal_distribution<double> n;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    Eigen::Vector3d x(n(rng), n(rng), n(rng)), y(n(rng), n(rng), n(rng));
    const double d = euclidean_quotient_distance(x, y, G);
    for (const auto& g : G.elements()) worst = std::max(worst, std::abs(euclidean_quotient_distance(g.apply(x), y, G) - d));
    worst = std::max(worst, d - (x - y).norm());
  }
  return worst;
}

}  // namespace

int cmd_selftest(const Options& opts) {
  std::mt19937_64 rng(opts.seed.value_or(20240601));
  const std::vector<Check> checks{
      {"assignment matches permutation scan", [&] { return assignment_vs_scan(rng); }, 0.0},
      {"ivanov embedding is isometric", [&] { return ivanov_isometry(rng); }, 1e-9},
      {"group metrics are bi-invariant", [&] { return bi_invariance(rng); }, 1e-12},
      {"embeddings are 1-Lipschitz with left inverse", [&] { return embedding_contract(rng); }, 1e-12},
      {"lifted atoms fold back to their source", [&] { return projection_roundtrip(rng, opts.jobs); }, 1e-9},
      {"sphere chains have markov type 2 with K = 1", [&] { return markov_sphere(opts.jobs); }, 1e-9},
      {"quotient distance is orbit invariant", [&] { return orbit_invariance(rng); }, 1e-10},
  };
  int failed = 0;
  for (const auto& c : checks) {
    const double w = c.worst();
    const bool ok = w <= c.tolerance;
    failed += !ok;
    std::printf("[%s] %s (worst %.3g, tol %.3g)\n", ok ? "PASS" : "FAIL", c.name, w, c.tolerance);
  }
  return failed == 0 ? kSuccess : kCheckFailed;
}

}  // namespace flatspace::cli
