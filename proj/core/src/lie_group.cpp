#include "flatspace/lie_group.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flatspace {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMeshSamples = 100000;
constexpr std::size_t kSu2PoolSize = 4096;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

double circle_distance(double a, double b, double period) {
  const double d = wrap(a - b, period);
  return std::min(d, period - d);
}

// chord / arc on a circle of radius R at arc length s.
double chord_ratio(double s, double radius) {
  const double half = s / (2.0 * radius);
  return half == 0.0 ? 1.0 : std::sin(half) / half;
}

Eigen::Vector4d coeffs(const Eigen::Quaterniond& q) { return {q.w(), q.x(), q.y(), q.z()}; }

// Angle between two unit quaternions as points of S^3; stable near 0 and pi.
double sphere_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  const Eigen::Vector4d u = coeffs(a), v = coeffs(b);
  return 2.0 * std::atan2((u - v).norm(), (u + v).norm());
}

Eigen::Quaterniond random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  while (true) {
    Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
    const double n = q.norm();
    if (n > 1e-9) {
      q.coeffs() /= n;
      return q;
    }
  }
}

[[noreturn]] void kind_mismatch(const char* what) {
  throw std::invalid_argument(std::string("group element does not match group kind: ") + what);
}

}  // namespace

// ---------------------------------------------------------------------------
// GroupSpec

GroupSpec GroupSpec::torus(std::size_t dims, double circumference) {
  if (dims == 0) throw std::invalid_argument("torus needs at least one dimension");
  return torus(std::vector<double>(dims, circumference));
}

GroupSpec GroupSpec::torus(std::vector<double> circumference) {
  if (circumference.empty()) throw std::invalid_argument("torus needs at least one dimension");
  for (double L : circumference)
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("torus circumference must be positive");
  return GroupSpec(TorusSpec{std::move(circumference)});
}

GroupSpec GroupSpec::su2(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("SU(2) radius must be positive");
  return GroupSpec(SU2Spec{radius});
}

GroupSpec GroupSpec::product(std::vector<GroupSpec> factors) {
  if (factors.empty()) throw std::invalid_argument("product needs at least one factor");
  return GroupSpec(ProductSpec{std::move(factors)});
}

GroupSpec GroupSpec::power(const GroupSpec& base, std::size_t n) {
  return product(std::vector<GroupSpec>(n, base));
}

GroupSpec GroupSpec::scaled(const GroupSpec& base, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("scale factor must be positive");
  if (const auto* s = base.as<ScaledSpec>()) return scaled(*s->base, s->factor * factor);
  if (factor == 1.0) return base;
  return GroupSpec(ScaledSpec{std::make_shared<const GroupSpec>(base), factor});
}

double GroupSpec::scale() const noexcept {
  const auto* s = as<ScaledSpec>();
  return s ? s->factor : 1.0;
}

const GroupSpec& GroupSpec::unscaled() const noexcept {
  const auto* s = as<ScaledSpec>();
  return s ? *s->base : *this;
}

std::size_t GroupSpec::embedding_dimension() const {
  return std::visit(overloaded{
                        [](const TorusSpec& t) -> std::size_t { return 2 * t.dims(); },
                        [](const SU2Spec&) -> std::size_t { return 4; },
                        [](const ProductSpec& p) -> std::size_t {
                          std::size_t k = 0;
                          for (const auto& f : p.factors) k += f.embedding_dimension();
                          return k;
                        },
                        [](const ScaledSpec& s) -> std::size_t { return s.base->embedding_dimension(); },
                    },
                    kind_);
}

bool GroupSpec::operator==(const GroupSpec& other) const {
  if (kind_.index() != other.kind_.index()) return false;
  return std::visit(overloaded{
                        [&](const TorusSpec& t) { return t.circumference == other.as<TorusSpec>()->circumference; },
                        [&](const SU2Spec& s) { return s.radius == other.as<SU2Spec>()->radius; },
                        [&](const ProductSpec& p) { return p.factors == other.as<ProductSpec>()->factors; },
                        [&](const ScaledSpec& s) {
                          const auto* o = other.as<ScaledSpec>();
                          return s.factor == o->factor && *s.base == *o->base;
                        },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------
// GroupElement

const GroupElement::Coordinates& GroupElement::coordinates() const {
  if (const auto* c = std::get_if<Coordinates>(&value_)) return *c;
  kind_mismatch("expected torus coordinates");
}

const GroupElement::Quaternion& GroupElement::quaternion() const {
  if (const auto* q = std::get_if<Quaternion>(&value_)) return *q;
  kind_mismatch("expected quaternion");
}

const GroupElement::Tuple& GroupElement::factors() const {
  if (const auto* t = std::get_if<Tuple>(&value_)) return *t;
  kind_mismatch("expected product tuple");
}

bool GroupElement::operator==(const GroupElement& other) const {
  if (value_.index() != other.value_.index()) return false;
  return std::visit(overloaded{
                        [&](const Coordinates& c) { return c == other.coordinates(); },
                        [&](const Quaternion& q) { return q.coeffs() == other.quaternion().coeffs(); },
                        [&](const Tuple& t) { return t == other.factors(); },
                    },
                    value_);
}

// ---------------------------------------------------------------------------
// Membership

void check_member(const GroupSpec& G, const GroupElement& g) {
  std::visit(overloaded{
                 [&](const TorusSpec& t) {
                   const auto& c = g.coordinates();
                   if (c.size() != t.dims()) kind_mismatch("torus dimension");
                   for (double x : c)
                     if (!std::isfinite(x)) throw std::invalid_argument("torus coordinate is not finite");
                 },
                 [&](const SU2Spec&) {
                   const auto& q = g.quaternion();
                   if (!q.coeffs().allFinite() || std::abs(q.norm() - 1.0) > 1e-12)
                     throw std::invalid_argument("SU(2) element must be a unit quaternion");
                 },
                 [&](const ProductSpec& p) {
                   const auto& f = g.factors();
                   if (f.size() != p.factors.size()) kind_mismatch("product arity");
                   for (std::size_t i = 0; i < f.size(); ++i) check_member(p.factors[i], f[i]);
                 },
                 [&](const ScaledSpec& s) { check_member(*s.base, g); },
             },
             G.kind());
}

GroupElement canonicalize(const GroupSpec& G, const GroupElement& g) {
  return std::visit(overloaded{
                        [&](const TorusSpec& t) {
                          auto c = g.coordinates();
                          if (c.size() != t.dims()) kind_mismatch("torus dimension");
                          for (std::size_t i = 0; i < c.size(); ++i) c[i] = wrap(c[i], t.circumference[i]);
                          return GroupElement(std::move(c));
                        },
                        [&](const SU2Spec&) { return GroupElement(g.quaternion().normalized()); },
                        [&](const ProductSpec& p) {
                          const auto& f = g.factors();
                          if (f.size() != p.factors.size()) kind_mismatch("product arity");
                          GroupElement::Tuple out;
                          out.reserve(f.size());
                          for (std::size_t i = 0; i < f.size(); ++i) out.push_back(canonicalize(p.factors[i], f[i]));
                          return GroupElement(std::move(out));
                        },
                        [&](const ScaledSpec& s) { return canonicalize(*s.base, g); },
                    },
                    G.kind());
}

// ---------------------------------------------------------------------------
// Metric and group structure

double geodesic_distance(const GroupSpec& G, const GroupElement& g, const GroupElement& h) {
  return std::visit(overloaded{
                        [&](const TorusSpec& t) {
                          const auto& a = g.coordinates();
                          const auto& b = h.coordinates();
                          if (a.size() != t.dims() || b.size() != t.dims()) kind_mismatch("torus dimension");
                          double s = 0.0;
                          for (std::size_t i = 0; i < a.size(); ++i) {
                            const double d = circle_distance(a[i], b[i], t.circumference[i]);
                            s += d * d;
                          }
                          return std::sqrt(s);
                        },
                        [&](const SU2Spec& s) { return s.radius * sphere_angle(g.quaternion(), h.quaternion()); },
                        [&](const ProductSpec& p) {
                          const auto& a = g.factors();
                          const auto& b = h.factors();
                          if (a.size() != p.factors.size() || b.size() != p.factors.size())
                            kind_mismatch("product arity");
                          double s = 0.0;
                          for (std::size_t i = 0; i < a.size(); ++i) {
                            const double d = geodesic_distance(p.factors[i], a[i], b[i]);
                            s += d * d;
                          }
                          return std::sqrt(s);
                        },
                        [&](const ScaledSpec& s) { return s.factor * geodesic_distance(*s.base, g, h); },
                    },
                    G.kind());
}

GroupElement identity(const GroupSpec& G) {
  return std::visit(overloaded{
                        [](const TorusSpec& t) { return GroupElement(GroupElement::Coordinates(t.dims(), 0.0)); },
                        [](const SU2Spec&) { return GroupElement(Eigen::Quaterniond::Identity()); },
                        [](const ProductSpec& p) {
                          GroupElement::Tuple out;
                          for (const auto& f : p.factors) out.push_back(identity(f));
                          return GroupElement(std::move(out));
                        },
                        [](const ScaledSpec& s) { return identity(*s.base); },
                    },
                    G.kind());
}

GroupElement group_op(const GroupSpec& G, const GroupElement& g, const GroupElement& h) {
  return std::visit(overloaded{
                        [&](const TorusSpec& t) {
                          const auto& a = g.coordinates();
                          const auto& b = h.coordinates();
                          if (a.size() != t.dims() || b.size() != t.dims()) kind_mismatch("torus dimension");
                          GroupElement::Coordinates c(a.size());
                          for (std::size_t i = 0; i < a.size(); ++i) c[i] = wrap(a[i] + b[i], t.circumference[i]);
                          return GroupElement(std::move(c));
                        },
                        [&](const SU2Spec&) {
                          return GroupElement(Eigen::Quaterniond(g.quaternion() * h.quaternion()).normalized());
                        },
                        [&](const ProductSpec& p) {
                          const auto& a = g.factors();
                          const auto& b = h.factors();
                          if (a.size() != p.factors.size() || b.size() != p.factors.size())
                            kind_mismatch("product arity");
                          GroupElement::Tuple out;
                          out.reserve(a.size());
                          for (std::size_t i = 0; i < a.size(); ++i) out.push_back(group_op(p.factors[i], a[i], b[i]));
                          return GroupElement(std::move(out));
                        },
                        [&](const ScaledSpec& s) { return group_op(*s.base, g, h); },
                    },
                    G.kind());
}

GroupElement inverse(const GroupSpec& G, const GroupElement& g) {
  return std::visit(overloaded{
                        [&](const TorusSpec& t) {
                          const auto& a = g.coordinates();
                          if (a.size() != t.dims()) kind_mismatch("torus dimension");
                          GroupElement::Coordinates c(a.size());
                          for (std::size_t i = 0; i < a.size(); ++i) c[i] = wrap(-a[i], t.circumference[i]) + 0.0;
                          return GroupElement(std::move(c));
                        },
                        [&](const SU2Spec&) { return GroupElement(g.quaternion().conjugate()); },
                        [&](const ProductSpec& p) {
                          const auto& a = g.factors();
                          if (a.size() != p.factors.size()) kind_mismatch("product arity");
                          GroupElement::Tuple out;
                          out.reserve(a.size());
                          for (std::size_t i = 0; i < a.size(); ++i) out.push_back(inverse(p.factors[i], a[i]));
                          return GroupElement(std::move(out));
                        },
                        [&](const ScaledSpec& s) { return inverse(*s.base, g); },
                    },
                    G.kind());
}

GroupElement random_element(const GroupSpec& G, std::mt19937_64& rng) {
  return std::visit(overloaded{
                        [&](const TorusSpec& t) {
                          GroupElement::Coordinates c(t.dims());
                          for (std::size_t i = 0; i < c.size(); ++i) {
                            std::uniform_real_distribution<double> u(0.0, t.circumference[i]);
                            c[i] = wrap(u(rng), t.circumference[i]);
                          }
                          return GroupElement(std::move(c));
                        },
                        [&](const SU2Spec&) { return GroupElement(random_quaternion(rng)); },
                        [&](const ProductSpec& p) {
                          GroupElement::Tuple out;
                          for (const auto& f : p.factors) out.push_back(random_element(f, rng));
                          return GroupElement(std::move(out));
                        },
                        [&](const ScaledSpec& s) { return random_element(*s.base, rng); },
                    },
                    G.kind());
}

// ---------------------------------------------------------------------------
// Nets

namespace {

GroupNet torus_net(const TorusSpec& t, std::size_t q) {
  const std::size_t d = t.dims();
  std::size_t count = 1;
  for (std::size_t i = 0; i < d; ++i) count *= q;
  GroupNet out;
  out.points.reserve(count);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t n = 0; n < count; ++n) {
    GroupElement::Coordinates c(d);
    for (std::size_t i = 0; i < d; ++i)
      c[i] = static_cast<double>(idx[i]) * t.circumference[i] / static_cast<double>(q);
    out.points.emplace_back(std::move(c));
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < q) break;
      idx[i] = 0;
    }
  }
  double s = 0.0;
  for (double L : t.circumference) {
    const double h = L / (2.0 * static_cast<double>(q));
    s += h * h;
  }
  out.mesh = std::sqrt(s);
  return out;
}

GroupNet su2_net(const SU2Spec& s, std::size_t q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t pool_size = std::max(kSu2PoolSize, 4 * q);
  std::vector<Eigen::Vector4d> pool(pool_size);
  for (auto& p : pool) p = coeffs(random_quaternion(rng));

  // Nearest-net distance is monotone in the dot product, so track max dot.
  std::vector<Eigen::Vector4d> chosen{Eigen::Vector4d(1.0, 0.0, 0.0, 0.0)};
  std::vector<double> best_dot(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) best_dot[i] = pool[i].dot(chosen.front());
  while (chosen.size() < q) {
    const auto far = static_cast<std::size_t>(std::min_element(best_dot.begin(), best_dot.end()) - best_dot.begin());
    chosen.push_back(pool[far]);
    for (std::size_t i = 0; i < pool_size; ++i) best_dot[i] = std::max(best_dot[i], pool[i].dot(pool[far]));
  }

  std::mt19937_64 probe_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  double worst = 0.0;
  for (std::size_t k = 0; k < kMeshSamples; ++k) {
    const Eigen::Vector4d x = coeffs(random_quaternion(probe_rng));
    double dot = -1.0;
    for (const auto& c : chosen) dot = std::max(dot, x.dot(c));
    worst = std::max(worst, std::acos(std::clamp(dot, -1.0, 1.0)));
  }

  GroupNet out;
  out.points.reserve(chosen.size());
  for (const auto& c : chosen) out.points.emplace_back(Eigen::Quaterniond(c[0], c[1], c[2], c[3]));
  out.mesh = s.radius * worst;
  return out;
}

}  // namespace

GroupNet net(const GroupSpec& G, std::size_t q, std::uint64_t seed) {
  if (q == 0) throw std::invalid_argument("net size must be positive");
  return std::visit(overloaded{
                        [&](const TorusSpec& t) { return torus_net(t, q); },
                        [&](const SU2Spec& s) { return su2_net(s, q, seed); },
                        [&](const ProductSpec& p) {
                          GroupNet out;
                          out.points.emplace_back(GroupElement::Tuple{});
                          double mesh2 = 0.0;
                          for (std::size_t f = 0; f < p.factors.size(); ++f) {
                            const GroupNet factor = net(p.factors[f], q, seed + f);
                            mesh2 += factor.mesh * factor.mesh;
                            std::vector<GroupElement> next;
                            next.reserve(out.points.size() * factor.points.size());
                            for (const auto& partial : out.points)
                              for (const auto& pt : factor.points) {
                                auto tuple = partial.factors();
                                tuple.push_back(pt);
                                next.emplace_back(std::move(tuple));
                              }
                            out.points = std::move(next);
                          }
                          out.mesh = std::sqrt(mesh2);
                          return out;
                        },
                        [&](const ScaledSpec& s) {
                          GroupNet out = net(*s.base, q, seed);
                          out.mesh *= s.factor;
                          return out;
                        },
                    },
                    G.kind());
}

// ---------------------------------------------------------------------------
// Embedding

namespace {

void embed_into(const GroupSpec& G, const GroupElement& g, double scale, Eigen::VectorXd& out, Eigen::Index& pos) {
  std::visit(overloaded{
                 [&](const TorusSpec& t) {
                   const auto& c = g.coordinates();
                   if (c.size() != t.dims()) kind_mismatch("torus dimension");
                   for (std::size_t i = 0; i < c.size(); ++i) {
                     const double L = t.circumference[i];
                     const double radius = scale * L / kTwoPi;
                     const double angle = kTwoPi * c[i] / L;
                     out[pos++] = radius * std::cos(angle);
                     out[pos++] = radius * std::sin(angle);
                   }
                 },
                 [&](const SU2Spec& s) {
                   const auto& q = g.quaternion();
                   const double r = scale * s.radius;
                   out[pos++] = r * q.w();
                   out[pos++] = r * q.x();
                   out[pos++] = r * q.y();
                   out[pos++] = r * q.z();
                 },
                 [&](const ProductSpec& p) {
                   const auto& f = g.factors();
                   if (f.size() != p.factors.size()) kind_mismatch("product arity");
                   for (std::size_t i = 0; i < f.size(); ++i) embed_into(p.factors[i], f[i], scale, out, pos);
                 },
                 [&](const ScaledSpec& s) { embed_into(*s.base, g, scale * s.factor, out, pos); },
             },
             G.kind());
}

GroupElement invert_from(const GroupSpec& G, const Eigen::VectorXd& p, double scale, Eigen::Index& pos) {
  return std::visit(
      overloaded{
          [&](const TorusSpec& t) {
            GroupElement::Coordinates c(t.dims());
            for (std::size_t i = 0; i < c.size(); ++i) {
              const double L = t.circumference[i];
              const double radius = scale * L / kTwoPi;
              const double a = p[pos++], b = p[pos++];
              if (std::abs(std::hypot(a, b) - radius) > kManifoldTolerance)
                throw std::domain_error("point is off the embedded torus");
              c[i] = wrap(std::atan2(b, a) * L / kTwoPi, L);
            }
            return GroupElement(std::move(c));
          },
          [&](const SU2Spec& s) {
            const double r = scale * s.radius;
            const Eigen::Vector4d v = p.segment<4>(pos);
            pos += 4;
            if (std::abs(v.norm() - r) > kManifoldTolerance)
              throw std::domain_error("point is off the embedded 3-sphere");
            const Eigen::Vector4d u = v.normalized();
            return GroupElement(Eigen::Quaterniond(u[0], u[1], u[2], u[3]));
          },
          [&](const ProductSpec& prod) {
            GroupElement::Tuple out;
            out.reserve(prod.factors.size());
            for (const auto& f : prod.factors) out.push_back(invert_from(f, p, scale, pos));
            return GroupElement(std::move(out));
          },
          [&](const ScaledSpec& s) { return invert_from(*s.base, p, scale * s.factor, pos); },
      },
      G.kind());
}

}  // namespace

EmbeddedPoint nash_embed(const GroupSpec& G, const GroupElement& g) {
  EmbeddedPoint out(static_cast<Eigen::Index>(G.embedding_dimension()));
  Eigen::Index pos = 0;
  embed_into(G, g, 1.0, out, pos);
  return out;
}

GroupElement nash_inverse(const GroupSpec& G, const EmbeddedPoint& p) {
  if (p.size() != static_cast<Eigen::Index>(G.embedding_dimension()))
    throw std::domain_error("embedded point has the wrong dimension");
  if (!p.allFinite()) throw std::domain_error("embedded point is not finite");
  Eigen::Index pos = 0;
  return invert_from(G, p, 1.0, pos);
}

// ---------------------------------------------------------------------------
// Constants

double local_embedding_distortion(const GroupSpec& G, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  return std::visit(overloaded{
                        [&](const TorusSpec& t) {
                          // Worst ratio puts the whole displacement into one coordinate circle.
                          double r = 1.0;
                          for (double L : t.circumference)
                            r = std::min(r, chord_ratio(std::min(threshold, L / 2.0), L / kTwoPi));
                          return r;
                        },
                        [&](const SU2Spec& s) {
                          return chord_ratio(std::min(threshold, kPi * s.radius), s.radius);
                        },
                        [&](const ProductSpec& p) {
                          double r = 1.0;
                          for (const auto& f : p.factors) r = std::min(r, local_embedding_distortion(f, threshold));
                          return r;
                        },
                        [&](const ScaledSpec& s) { return local_embedding_distortion(*s.base, threshold / s.factor); },
                    },
                    G.kind());
}

double diameter(const GroupSpec& G) {
  return std::visit(overloaded{
                        [](const TorusSpec& t) {
                          double s = 0.0;
                          for (double L : t.circumference) s += (L / 2.0) * (L / 2.0);
                          return std::sqrt(s);
                        },
                        [](const SU2Spec& s) { return kPi * s.radius; },
                        [](const ProductSpec& p) {
                          double s = 0.0;
                          for (const auto& f : p.factors) {
                            const double d = diameter(f);
                            s += d * d;
                          }
                          return std::sqrt(s);
                        },
                        [](const ScaledSpec& s) { return s.factor * diameter(*s.base); },
                    },
                    G.kind());
}

double inverse_lipschitz_bound(const GroupSpec& G) {
  return std::visit(overloaded{
                        [](const TorusSpec&) { return kPi / 2.0; },
                        [](const SU2Spec&) { return kPi / 2.0; },
                        [](const ProductSpec& p) {
                          double L = 0.0;
                          for (const auto& f : p.factors) L = std::max(L, inverse_lipschitz_bound(f));
                          return L;
                        },
                        [](const ScaledSpec& s) { return inverse_lipschitz_bound(*s.base); },
                    },
                    G.kind());
}

bool is_abelian(const GroupSpec& G) {
  return std::visit(overloaded{
                        [](const TorusSpec&) { return true; },
                        [](const SU2Spec&) { return false; },
                        [](const ProductSpec& p) {
                          return std::all_of(p.factors.begin(), p.factors.end(),
                                             [](const GroupSpec& f) { return is_abelian(f); });
                        },
                        [](const ScaledSpec& s) { return is_abelian(*s.base); },
                    },
                    G.kind());
}

}  // namespace flatspace
