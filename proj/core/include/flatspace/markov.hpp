#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flatspace/lie_group.hpp"
#include "flatspace/metric_space.hpp"
#include "flatspace/quotient.hpp"
#include "flatspace/transport.hpp"

namespace flatspace {

/// Stationary reversible chain (pi, A). Validated on construction: rows of A
/// sum to 1 (1e-12), pi is a probability vector, pi A = pi (1e-10) and
/// detailed balance pi_i a_ij = pi_j a_ji (1e-12). At most 64 states.
class ReversibleChain {
 public:
  static constexpr std::size_t kMaxStates = 64;

  ReversibleChain(Eigen::VectorXd pi, Eigen::MatrixXd transition);

  std::size_t size() const noexcept { return static_cast<std::size_t>(pi_.size()); }
  const Eigen::VectorXd& pi() const noexcept { return pi_; }
  const Eigen::MatrixXd& transition() const noexcept { return a_; }

 private:
  Eigen::VectorXd pi_;
  Eigen::MatrixXd a_;
};

/// pi_i = rowsum_i / total, a_ij = W_ij / rowsum_i for symmetric nonnegative W.
ReversibleChain chain_from_weights(const Eigen::MatrixXd& weights);

/// A^t by t - 1 multiplications.
Eigen::MatrixXd transition_power(const Eigen::MatrixXd& a, int t);
/// A^t by repeated squaring.
Eigen::MatrixXd transition_power_by_squaring(const Eigen::MatrixXd& a, int t);

/// A chain together with the pairwise distances of its images f(1..n).
struct MappedConfiguration {
  ReversibleChain chain;
  DistanceMatrix distances;
  /// Target space and image coordinates in readable form, for reports.
  std::string space;
  std::vector<std::string> images;
};

/// Builds the configuration from images and any metric on them.
template <class Image, class Metric>
MappedConfiguration map_chain(ReversibleChain chain, const std::vector<Image>& images, Metric&& metric,
                              std::string space = {}, std::vector<std::string> descriptions = {}) {
  const std::size_t n = chain.size();
  if (images.size() != n) throw std::invalid_argument("need one image per chain state");
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = metric(images[i], images[j]);
  return MappedConfiguration{std::move(chain), DistanceMatrix(n, std::move(d)), std::move(space),
                             std::move(descriptions)};
}

/// Images given as points of a finite metric space.
MappedConfiguration map_chain(ReversibleChain chain, const FiniteMetricSpace& space,
                              const std::vector<std::size_t>& images);

/// E d^2(f(Z_t), f(Z_0)) / (t E d^2(f(Z_1), f(Z_0))); nullopt when the
/// denominator vanishes (frozen chain or constant map).
std::optional<double> markov_ratio(const MappedConfiguration& cfg, int t);

/// Ratios for t = 1..t_max sharing the matrix powers.
std::vector<std::optional<double>> markov_ratios(const MappedConfiguration& cfg, int t_max);

/// Produces the configuration for one trial from its own seed.
using ConfigurationSampler = std::function<MappedConfiguration(std::uint64_t seed)>;

enum class MarkovTarget { Euclidean, Sphere, Torus, Quotient, Frozen };

const char* to_string(MarkovTarget t);
MarkovTarget markov_target_from_string(const std::string& s);

struct SamplerOptions {
  MarkovTarget target = MarkovTarget::Sphere;
  std::size_t min_states = 2;
  std::size_t max_states = 6;
  /// Ambient dimension for Euclidean and quotient targets, torus dimension.
  std::size_t dimension = 3;
  /// Sphere radius or torus circumference.
  double scale = 1.0;
  /// Probability that an off-diagonal weight is zero.
  double sparsity = 0.3;
};

/// Random reversible chain with Haar or Gaussian images in the chosen target.
/// Quotient images live in E^d / S_d.
ConfigurationSampler make_sampler(const SamplerOptions& options);

struct MarkovRow {
  std::size_t trial = 0;
  int t = 0;
  std::optional<double> ratio;
  /// Max over t' <= t of this trial's ratios (nullopt while all vacuous).
  std::optional<double> max_over_t;
};

struct MarkovReport {
  double K = 1.0;
  int t_max = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<MarkovRow> rows;
  double max_ratio = 0.0;
  std::optional<std::size_t> argmax_trial;
  int argmax_t = 0;
  std::optional<MappedConfiguration> worst;
  std::size_t vacuous_trials = 0;
  bool all_vacuous = false;
  bool passed = true;
};

inline constexpr double kMarkovTolerance = 1e-9;

/// Evaluates every (trial, t <= t_max); passes iff max ratio <= K^2 + 1e-9.
/// Trial k uses a seed derived from (seed, k), so results do not depend on jobs.
MarkovReport verify_markov_type2(const ConfigurationSampler& sampler, std::size_t trials, int t_max, double K,
                                 std::uint64_t seed, unsigned jobs = 1);

}  // namespace flatspace
