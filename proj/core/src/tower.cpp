#include "flatspace/tower.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "parallel.hpp"
#include "seeding.hpp"

namespace flatspace {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::size_t saturating_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r = saturating_mul(r, base);
  return r;
}

// Number of points net(G, q) returns.
std::size_t base_net_size(const GroupSpec& G, std::size_t q) {
  if (const auto* t = G.as<TorusSpec>()) return saturating_pow(q, t->dims());
  if (G.as<SU2Spec>()) return q;
  if (const auto* p = G.as<ProductSpec>()) {
    std::size_t n = 1;
    for (const auto& f : p->factors) n = saturating_mul(n, base_net_size(f, q));
    return n;
  }
  return base_net_size(*G.as<ScaledSpec>()->base, q);
}

bool walsh_negative(std::size_t j) { return std::popcount(j) % 2 == 1; }

std::uint64_t level_seed(std::uint64_t seed, int level) {
  return detail::mix_seed(seed, static_cast<std::uint64_t>(level));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const char* to_string(NetStrategy s) {
  return s == NetStrategy::Twisted ? "twisted" : "product";
}

NetStrategy net_strategy_from_string(const std::string& s) {
  if (s == "twisted") return NetStrategy::Twisted;
  if (s == "product") return NetStrategy::Product;
  throw std::invalid_argument("unknown net strategy '" + s + "'");
}

void TowerConfig::validate() const {
  if (depth < 0 || depth % 2 != 0) throw std::invalid_argument("tower depth must be a nonnegative even integer");
  if (net_sizes.size() != static_cast<std::size_t>(depth))
    throw std::invalid_argument("net_sizes must list one size per level");
  for (std::size_t q : net_sizes)
    if (q == 0) throw std::invalid_argument("net sizes must be positive");
  if (atom_cap == 0) throw std::invalid_argument("atom cap must be positive");
  if (depth > 20) throw std::invalid_argument("tower depth is unreasonably large");
}

double TowerConfig::lattice_scale() const { return std::ldexp(1.0, depth / 2); }

AtomCapExceeded::AtomCapExceeded(int level, std::size_t atoms, std::size_t cap)
    : std::runtime_error("atom cap exceeded at level " + std::to_string(level) + ": " +
                         (atoms == kSaturated ? std::string("overflow") : std::to_string(atoms)) + " > " +
                         std::to_string(cap)),
      level_(level),
      atoms_(atoms) {}

// ---------------------------------------------------------------------------

std::vector<GroupSpec> build_tower(const TowerConfig& config) {
  config.validate();
  std::vector<GroupSpec> levels{config.group};
  for (int i = 0; i < config.depth; ++i) {
    const GroupSpec& prev = levels.back();
    levels.push_back(GroupSpec::scaled(GroupSpec::product({prev, prev}), std::numbers::sqrt2));
  }
  return levels;
}

GroupElement to_level_element(const LevelAtom& atom) {
  if (atom.empty()) throw std::invalid_argument("empty level atom");
  if (atom.size() == 1) return atom.front();
  if (!std::has_single_bit(atom.size())) throw std::invalid_argument("level atom length must be a power of two");
  const auto half = static_cast<std::ptrdiff_t>(atom.size() / 2);
  return GroupElement(GroupElement::Tuple{to_level_element(LevelAtom(atom.begin(), atom.begin() + half)),
                                          to_level_element(LevelAtom(atom.begin() + half, atom.end()))});
}

double level_scale(int level) { return std::pow(std::numbers::sqrt2, level); }

double level_distance(const GroupSpec& G, int level, const LevelAtom& a, const LevelAtom& b) {
  if (a.size() != b.size()) throw std::invalid_argument("level atoms differ in length");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = geodesic_distance(G, a[j], b[j]);
    s += d * d;
  }
  return level_scale(level) * std::sqrt(s);
}

std::size_t level_net_size(const TowerConfig& config, int level) {
  const std::size_t base = base_net_size(config.group, config.net_sizes.at(static_cast<std::size_t>(level)));
  if (config.strategy == NetStrategy::Twisted) return base;
  return saturating_pow(base, std::size_t{1} << level);
}

LevelNet level_net(const TowerConfig& config, int level) {
  const auto q = config.net_sizes.at(static_cast<std::size_t>(level));
  const GroupSpec& G = config.group;
  const GroupNet base = net(G, q, level_seed(config.seed, level));
  const std::size_t width = std::size_t{1} << level;
  LevelNet out;
  // Both strategies: covering radius 2^(i/2) * sqrt(2^i) * mesh_G = 2^i mesh_G.
  out.mesh = std::ldexp(base.mesh, level);
  if (config.strategy == NetStrategy::Twisted) {
    out.elements.reserve(base.points.size());
    for (const auto& s : base.points) {
      const GroupElement s_inv = inverse(G, s);
      LevelAtom atom(width);
      for (std::size_t j = 0; j < width; ++j) atom[j] = walsh_negative(j) ? s_inv : s;
      out.elements.push_back(std::move(atom));
    }
    return out;
  }
  const std::size_t count = saturating_pow(base.points.size(), width);
  if (count > config.atom_cap) throw AtomCapExceeded(level + 1, count, config.atom_cap);
  out.elements.reserve(count);
  std::vector<std::size_t> idx(width, 0);
  for (std::size_t n = 0; n < count; ++n) {
    LevelAtom atom(width);
    for (std::size_t j = 0; j < width; ++j) atom[j] = base.points[idx[j]];
    out.elements.push_back(std::move(atom));
    for (std::size_t j = width; j-- > 0;) {
      if (++idx[j] < base.points.size()) break;
      idx[j] = 0;
    }
  }
  return out;
}

LiftedMeasure delta_measure(const GroupElement& x) { return LiftedMeasure{0, {LevelAtom{x}}, {1.0}}; }

LiftedMeasure lift_measure(const LiftedMeasure& mu, const GroupSpec& G, const std::vector<LevelAtom>& acting) {
  if (acting.empty()) throw std::invalid_argument("acting set must be nonempty");
  const std::size_t width = std::size_t{1} << mu.level;
  LiftedMeasure out;
  out.level = mu.level + 1;
  out.atoms.reserve(acting.size() * mu.atoms.size());
  out.weights.reserve(acting.size() * mu.atoms.size());
  const double share = 1.0 / static_cast<double>(acting.size());
  for (const auto& k : acting) {
    if (k.size() != width) throw std::invalid_argument("acting element has the wrong level width");
    for (std::size_t a = 0; a < mu.atoms.size(); ++a) {
      const auto& u = mu.atoms[a];
      LevelAtom atom;
      atom.reserve(2 * width);
      atom.insert(atom.end(), k.begin(), k.end());
      for (std::size_t j = 0; j < width; ++j) atom.push_back(group_op(G, k[j], u[j]));
      out.atoms.push_back(std::move(atom));
      out.weights.push_back(mu.weights[a] * share);
    }
  }
  return out;
}

LevelAtom fold(const GroupSpec& G, const LevelAtom& atom) {
  if (atom.size() < 2 || atom.size() % 2 != 0) throw std::invalid_argument("cannot fold an atom of odd length");
  const std::size_t half = atom.size() / 2;
  LevelAtom out(half);
  for (std::size_t j = 0; j < half; ++j) out[j] = group_op(G, inverse(G, atom[j]), atom[half + j]);
  return out;
}

EuclideanMeasure embed_level_m(const LiftedMeasure& mu, const TowerConfig& config) {
  if (mu.level != config.depth) throw std::invalid_argument("embed_level_m needs a measure at the top level");
  const GroupSpec scaled = GroupSpec::scaled(config.group, config.lattice_scale());
  const auto k = static_cast<Eigen::Index>(config.group.embedding_dimension());
  std::vector<Point> atoms;
  atoms.reserve(mu.atoms.size());
  for (const auto& atom : mu.atoms) {
    Point p(k * static_cast<Eigen::Index>(atom.size()));
    for (std::size_t j = 0; j < atom.size(); ++j) p.segment(static_cast<Eigen::Index>(j) * k, k) = nash_embed(scaled, atom[j]);
    atoms.push_back(std::move(p));
  }
  return EuclideanMeasure(std::move(atoms), mu.weights);
}

GroupElement project_back(const EmbeddedPoint& p, const TowerConfig& config) {
  const GroupSpec scaled = GroupSpec::scaled(config.group, config.lattice_scale());
  const auto k = static_cast<Eigen::Index>(config.group.embedding_dimension());
  const std::size_t width = std::size_t{1} << config.depth;
  if (p.size() != k * static_cast<Eigen::Index>(width)) throw std::domain_error("embedded point has the wrong dimension");
  LevelAtom atom(width);
  for (std::size_t j = 0; j < width; ++j)
    atom[j] = nash_inverse(scaled, p.segment(static_cast<Eigen::Index>(j) * k, k));
  for (int level = config.depth; level > 0; --level) atom = fold(config.group, atom);
  return atom.front();
}

std::vector<LiftedMeasure> lift_delta(const GroupElement& x, const TowerConfig& config,
                                      const std::vector<LevelNet>& nets) {
  std::vector<LiftedMeasure> levels{delta_measure(x)};
  for (int i = 0; i < config.depth; ++i) {
    const auto& acting = nets.at(static_cast<std::size_t>(i)).elements;
    const std::size_t next = saturating_mul(levels.back().atoms.size(), acting.size());
    if (next > config.atom_cap) throw AtomCapExceeded(i + 1, next, config.atom_cap);
    levels.push_back(lift_measure(levels.back(), config.group, acting));
  }
  return levels;
}

// ---------------------------------------------------------------------------

PipelineReport run_pipeline(const std::vector<GroupElement>& points, const TowerConfig& config,
                            std::vector<std::string> labels) {
  config.validate();
  if (points.empty()) throw std::invalid_argument("pipeline needs at least one point");
  if (labels.empty())
    for (std::size_t i = 0; i < points.size(); ++i) labels.push_back("x" + std::to_string(i));
  if (labels.size() != points.size()) throw std::invalid_argument("label count does not match point count");
  for (const auto& x : points) check_member(config.group, x);

  PipelineReport report;
  report.config = config;
  report.labels = std::move(labels);

  // Check the cap from net sizes alone before doing any work.
  std::size_t atoms = 1;
  report.atoms_per_level.push_back(1);
  for (int i = 0; i < config.depth; ++i) {
    atoms = saturating_mul(atoms, level_net_size(config, i));
    if (atoms > config.atom_cap) throw AtomCapExceeded(i + 1, atoms, config.atom_cap);
    report.atoms_per_level.push_back(atoms);
  }
  report.final_atoms = atoms;
  report.ambient_dimension = config.group.embedding_dimension() << config.depth;

  auto t0 = std::chrono::steady_clock::now();
  std::vector<LevelNet> nets;
  for (int i = 0; i < config.depth; ++i) {
    nets.push_back(level_net(config, i));
    report.level_mesh.push_back(nets.back().mesh);
    report.net_error_bound += 2.0 * std::numbers::sqrt2 * nets.back().mesh;
  }
  const std::size_t n = points.size();
  std::vector<std::vector<LiftedMeasure>> lifts(n);
  detail::parallel_for(n, config.jobs, [&](std::size_t k) { lifts[k] = lift_delta(points[k], config, nets); });
  report.timings.lift_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<Point>> images(n);
  std::vector<double> projection_error(n, 0.0);
  detail::parallel_for(n, config.jobs, [&](std::size_t k) {
    auto measure = embed_level_m(lifts[k].back(), config);
    for (const auto& p : measure.atoms())
      projection_error[k] =
          std::max(projection_error[k], geodesic_distance(config.group, project_back(p, config), points[k]));
    images[k] = measure.atoms();
  });
  report.projection_error = *std::max_element(projection_error.begin(), projection_error.end());
  report.timings.embed_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) report.pairs.push_back(PairRecord{i, j, 0.0, 0.0, 0.0, {}});
  const double norm = ivanov_normalisation(report.final_atoms);
  detail::parallel_for(report.pairs.size(), config.jobs, [&](std::size_t k) {
    auto& rec = report.pairs[k];
    rec.group_distance = geodesic_distance(config.group, points[rec.i], points[rec.j]);
    rec.final_distance = norm * perm_quotient_distance(images[rec.i], images[rec.j], euclidean_distance);
    rec.ratio = rec.group_distance > 0.0 ? rec.final_distance / rec.group_distance
                                         : std::numeric_limits<double>::infinity();
    if (config.level_diagnostics) {
      for (int level = 0; level <= config.depth; ++level) {
        const auto& a = lifts[rec.i][static_cast<std::size_t>(level)].atoms;
        const auto& b = lifts[rec.j][static_cast<std::size_t>(level)].atoms;
        const double w = ivanov_normalisation(a.size()) *
                         perm_quotient_distance(a, b, [&](const LevelAtom& u, const LevelAtom& v) {
                           return level_distance(config.group, level, u, v);
                         });
        rec.level_w2.push_back(w);
      }
    }
  });
  report.timings.distance_seconds = seconds_since(t0);

  std::vector<double> dg(n * n, 0.0), df(n * n, 0.0);
  for (const auto& rec : report.pairs) {
    dg[rec.i * n + rec.j] = dg[rec.j * n + rec.i] = rec.group_distance;
    df[rec.i * n + rec.j] = df[rec.j * n + rec.i] = rec.final_distance;
    if (rec.final_distance > rec.group_distance + report.net_error_bound + 1e-9) report.within_net_bound = false;
  }
  report.distortion = correspondence_distortion(DistanceMatrix(n, std::move(dg)), DistanceMatrix(n, std::move(df)));
  return report;
}

// ---------------------------------------------------------------------------

double abelian_lift_distance(const GroupElement& x, const GroupElement& y, const TowerConfig& config) {
  config.validate();
  const GroupSpec& G = config.group;
  const auto* torus = G.unscaled().as<TorusSpec>();
  if (!torus) throw std::invalid_argument("abelian_lift_distance needs a (scaled) torus");
  check_member(G, x);
  check_member(G, y);
  const std::size_t d = torus->dims();
  const std::size_t width = std::size_t{1} << config.depth;
  const std::size_t stride = width * d;

  std::size_t count = 1;
  for (int i = 0; i < config.depth; ++i) count = saturating_mul(count, level_net_size(config, i));
  if (saturating_mul(count, stride) > (std::size_t{1} << 27))
    throw std::invalid_argument("subgroup too large for the coset route");

  // Flat coordinates of the subgroup T_i; T_{i+1} = {(h, h + s)}.
  std::vector<double> T(d, 0.0);
  std::size_t size = 1;
  for (int i = 0; i < config.depth; ++i) {
    const LevelNet acting = level_net(config, i);
    const std::size_t w = std::size_t{1} << i;
    std::vector<double> next;
    next.reserve(acting.elements.size() * size * 2 * w * d);
    for (const auto& h : acting.elements)
      for (std::size_t s = 0; s < size; ++s) {
        for (std::size_t j = 0; j < w; ++j) {
          const auto& c = h[j].coordinates();
          next.insert(next.end(), c.begin(), c.end());
        }
        for (std::size_t j = 0; j < w; ++j) {
          const auto& c = h[j].coordinates();
          for (std::size_t r = 0; r < d; ++r) next.push_back(c[r] + T[s * w * d + j * d + r]);
        }
      }
    T = std::move(next);
    size *= acting.elements.size();
  }

  // t(y) - t(x) lives in the last block only.
  const auto& xc = x.coordinates();
  const auto& yc = y.coordinates();
  const double M = config.lattice_scale() * G.scale();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < size; ++s) {
    double total = 0.0;
    for (std::size_t j = 0; j < width; ++j)
      for (std::size_t r = 0; r < d; ++r) {
        double z = T[s * stride + j * d + r];
        if (j + 1 == width) z += yc[r] - xc[r];
        const double L = torus->circumference[r];
        const double chord = M * (L / std::numbers::pi) * std::sin(std::numbers::pi * z / L);
        total += chord * chord;
      }
    best = std::min(best, total);
  }
  return std::sqrt(best);
}

}  // namespace flatspace
