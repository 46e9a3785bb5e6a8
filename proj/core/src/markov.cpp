#include "flatspace/markov.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "seeding.hpp"

namespace flatspace {

ReversibleChain::ReversibleChain(Eigen::VectorXd pi, Eigen::MatrixXd transition)
    : pi_(std::move(pi)), a_(std::move(transition)) {
  const Eigen::Index n = pi_.size();
  if (n == 0) throw std::invalid_argument("chain needs at least one state");
  if (static_cast<std::size_t>(n) > kMaxStates) throw std::invalid_argument("chain has more than 64 states");
  if (a_.rows() != n || a_.cols() != n) throw std::invalid_argument("transition matrix size does not match pi");
  if (!pi_.allFinite() || !a_.allFinite()) throw std::invalid_argument("chain entries must be finite");
  if ((pi_.array() < 0.0).any() || (a_.array() < 0.0).any())
    throw std::invalid_argument("chain entries must be nonnegative");
  if (std::abs(pi_.sum() - 1.0) > 1e-12) throw std::invalid_argument("pi must sum to 1");
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(a_.row(i).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("row " + std::to_string(i) + " of the transition matrix does not sum to 1");
  if (((pi_.transpose() * a_).transpose() - pi_).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("pi is not stationary for the transition matrix");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(pi_[i] * a_(i, j) - pi_[j] * a_(j, i)) > 1e-12)
        throw std::invalid_argument("detailed balance fails for states " + std::to_string(i) + " and " +
                                    std::to_string(j));
}

ReversibleChain chain_from_weights(const Eigen::MatrixXd& weights) {
  const Eigen::Index n = weights.rows();
  if (n == 0 || weights.cols() != n) throw std::invalid_argument("weight matrix must be square and nonempty");
  if (!weights.allFinite() || (weights.array() < 0.0).any())
    throw std::invalid_argument("weights must be finite and nonnegative");
  if ((weights - weights.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("weight matrix must be symmetric");
  const Eigen::VectorXd rows = weights.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(rows[i] > 0.0)) throw std::invalid_argument("state " + std::to_string(i) + " has zero total weight");
  const double total = rows.sum();
  Eigen::MatrixXd a = weights;
  for (Eigen::Index i = 0; i < n; ++i) a.row(i) /= rows[i];
  return ReversibleChain(rows / total, std::move(a));
}

Eigen::MatrixXd transition_power(const Eigen::MatrixXd& a, int t) {
  if (t < 0) throw std::invalid_argument("power must be nonnegative");
  if (t == 0) return Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd p = a;
  for (int k = 1; k < t; ++k) p = p * a;
  return p;
}

Eigen::MatrixXd transition_power_by_squaring(const Eigen::MatrixXd& a, int t) {
  if (t < 0) throw std::invalid_argument("power must be nonnegative");
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd base = a;
  for (unsigned e = static_cast<unsigned>(t); e != 0; e >>= 1) {
    if (e & 1u) result = result * base;
    if (e > 1) base = base * base;
  }
  return result;
}

MappedConfiguration map_chain(ReversibleChain chain, const FiniteMetricSpace& space,
                              const std::vector<std::size_t>& images) {
  std::vector<std::string> labels;
  for (std::size_t k : images) {
    if (k >= space.size()) throw std::invalid_argument("image index outside the metric space");
    labels.push_back(space.labels()[k]);
  }
  return map_chain(
      std::move(chain), images, [&](std::size_t a, std::size_t b) { return space(a, b); }, "finite",
      std::move(labels));
}

namespace {

double expected_square(const Eigen::VectorXd& pi, const Eigen::MatrixXd& p, const Eigen::MatrixXd& d2) {
  return pi.dot((p.cwiseProduct(d2)).rowwise().sum());
}

Eigen::MatrixXd squared_distances(const DistanceMatrix& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd d2(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      d2(i, j) = v * v;
    }
  return d2;
}

}  // namespace

std::vector<std::optional<double>> markov_ratios(const MappedConfiguration& cfg, int t_max) {
  if (t_max < 1) throw std::invalid_argument("t must be at least 1");
  if (cfg.distances.size() != cfg.chain.size()) throw std::invalid_argument("need one image per chain state");
  const auto& a = cfg.chain.transition();
  const auto& pi = cfg.chain.pi();
  const Eigen::MatrixXd d2 = squared_distances(cfg.distances);
  const double denominator = expected_square(pi, a, d2);
  std::vector<std::optional<double>> out(static_cast<std::size_t>(t_max));
  if (!(denominator > 0.0)) return out;
  Eigen::MatrixXd p = a;
  for (int t = 1; t <= t_max; ++t) {
    if (t > 1) p = p * a;
    out[static_cast<std::size_t>(t - 1)] = expected_square(pi, p, d2) / (t * denominator);
  }
  return out;
}

std::optional<double> markov_ratio(const MappedConfiguration& cfg, int t) { return markov_ratios(cfg, t).back(); }

// ---------------------------------------------------------------------------

const char* to_string(MarkovTarget t) {
  switch (t) {
    case MarkovTarget::Euclidean: return "euclidean";
    case MarkovTarget::Sphere: return "sphere";
    case MarkovTarget::Torus: return "torus";
    case MarkovTarget::Quotient: return "quotient";
    case MarkovTarget::Frozen: return "frozen";
  }
  return "unknown";
}

MarkovTarget markov_target_from_string(const std::string& s) {
  for (auto t : {MarkovTarget::Euclidean, MarkovTarget::Sphere, MarkovTarget::Torus, MarkovTarget::Quotient,
                 MarkovTarget::Frozen})
    if (s == to_string(t)) return t;
  throw std::invalid_argument("unknown markov target '" + s + "'");
}

namespace {

std::string describe(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << std::setprecision(17) << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

std::string describe(const GroupElement& g) {
  std::ostringstream os;
  os << std::setprecision(17) << '[';
  if (const auto* c = std::get_if<GroupElement::Coordinates>(&g.value())) {
    for (std::size_t i = 0; i < c->size(); ++i) os << (i ? "," : "") << (*c)[i];
  } else {
    const auto& q = g.quaternion();
    os << q.w() << ',' << q.x() << ',' << q.y() << ',' << q.z();
  }
  os << ']';
  return os.str();
}

Eigen::MatrixXd random_weights(std::size_t n, double sparsity, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = i; j < w.cols(); ++j) {
      const double v = (i != j && unit(rng) < sparsity) ? 0.0 : unit(rng);
      w(i, j) = w(j, i) = v;
    }
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    if (w.row(i).sum() == 0.0) w(i, i) = 1.0;
  return w;
}

}  // namespace

ConfigurationSampler make_sampler(const SamplerOptions& options) {
  if (options.min_states < 1 || options.max_states < options.min_states ||
      options.max_states > ReversibleChain::kMaxStates)
    throw std::invalid_argument("state counts must satisfy 1 <= min <= max <= 64");
  if (options.dimension == 0) throw std::invalid_argument("sampler dimension must be positive");
  if (!(options.scale > 0.0)) throw std::invalid_argument("sampler scale must be positive");
  if (!(options.sparsity >= 0.0 && options.sparsity < 1.0)) throw std::invalid_argument("sparsity must be in [0, 1)");

  return [options](std::uint64_t seed) -> MappedConfiguration {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> states(options.min_states, options.max_states);
    const std::size_t n = states(rng);
    const auto d = static_cast<Eigen::Index>(options.dimension);
    std::string space = to_string(options.target);

    if (options.target == MarkovTarget::Sphere || options.target == MarkovTarget::Torus) {
      const GroupSpec G = options.target == MarkovTarget::Sphere
                              ? GroupSpec::su2(options.scale)
                              : GroupSpec::torus(options.dimension, options.scale);
      ReversibleChain chain = chain_from_weights(random_weights(n, options.sparsity, rng));
      std::vector<GroupElement> images;
      std::vector<std::string> text;
      for (std::size_t k = 0; k < n; ++k) {
        images.push_back(random_element(G, rng));
        text.push_back(describe(images.back()));
      }
      return map_chain(
          std::move(chain), images,
          [&G](const GroupElement& a, const GroupElement& b) { return geodesic_distance(G, a, b); },
          std::move(space), std::move(text));
    }

    Eigen::MatrixXd w = options.target == MarkovTarget::Frozen
                            ? Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))
                            : random_weights(n, options.sparsity, rng);
    ReversibleChain chain = chain_from_weights(w);
    std::normal_distribution<double> gauss(0.0, options.scale);
    std::vector<Eigen::VectorXd> images;
    std::vector<std::string> text;
    for (std::size_t k = 0; k < n; ++k) {
      Eigen::VectorXd p(d);
      for (Eigen::Index i = 0; i < d; ++i) p[i] = gauss(rng);
      text.push_back(describe(p));
      images.push_back(std::move(p));
    }
    if (options.target == MarkovTarget::Quotient) {
      const FiniteIsometryGroup perms = FiniteIsometryGroup::symmetric_group(options.dimension);
      return map_chain(
          std::move(chain), images,
          [&perms](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return euclidean_quotient_distance(a, b, perms);
          },
          std::move(space), std::move(text));
    }
    return map_chain(std::move(chain), images, euclidean_distance, std::move(space), std::move(text));
  };
}

MarkovReport verify_markov_type2(const ConfigurationSampler& sampler, std::size_t trials, int t_max, double K,
                                 std::uint64_t seed, unsigned jobs) {
  if (t_max < 1) throw std::invalid_argument("t_max must be at least 1");
  if (!(K > 0.0) || !std::isfinite(K)) throw std::invalid_argument("K must be positive");
  MarkovReport report;
  report.K = K;
  report.t_max = t_max;
  report.trials = trials;
  report.seed = seed;

  std::vector<std::optional<MappedConfiguration>> configs(trials);
  std::vector<std::vector<std::optional<double>>> ratios(trials);
  detail::parallel_for(trials, jobs, [&](std::size_t k) {
    configs[k] = sampler(detail::mix_seed(seed, k));
    ratios[k] = markov_ratios(*configs[k], t_max);
  });

  for (std::size_t k = 0; k < trials; ++k) {
    std::optional<double> running;
    bool vacuous = true;
    for (int t = 1; t <= t_max; ++t) {
      const auto& r = ratios[k][static_cast<std::size_t>(t - 1)];
      if (r) {
        vacuous = false;
        running = running ? std::max(*running, *r) : *r;
        if (!report.argmax_trial || *r > report.max_ratio) {
          report.max_ratio = *r;
          report.argmax_trial = k;
          report.argmax_t = t;
        }
      }
      report.rows.push_back(MarkovRow{k, t, r, running});
    }
    if (vacuous) ++report.vacuous_trials;
  }
  report.all_vacuous = trials > 0 && report.vacuous_trials == trials;
  if (report.argmax_trial) report.worst = configs[*report.argmax_trial];
  report.passed = report.max_ratio <= K * K + kMarkovTolerance;
  return report;
}

}  // namespace flatspace
