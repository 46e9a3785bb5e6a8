#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace flatspace {

class GroupSpec;

/// Flat torus R^d / (L_1 Z x ... x L_d Z).
struct TorusSpec {
  std::vector<double> circumference;
  std::size_t dims() const noexcept { return circumference.size(); }
};

/// Unit quaternions with the round metric of the 3-sphere of the given radius.
struct SU2Spec {
  double radius = 1.0;
};

/// l2-product of factor groups.
struct ProductSpec {
  std::vector<GroupSpec> factors;
};

/// The base group with every distance multiplied by `factor`.
struct ScaledSpec {
  std::shared_ptr<const GroupSpec> base;
  double factor = 1.0;
};

/// A compact group with bi-invariant metric: tori, SU(2), and closure under
/// products and scaling. Immutable; cheap to copy.
class GroupSpec {
 public:
  using Kind = std::variant<TorusSpec, SU2Spec, ProductSpec, ScaledSpec>;

  static GroupSpec torus(std::size_t dims, double circumference);
  static GroupSpec torus(std::vector<double> circumference);
  static GroupSpec circle(double circumference) { return torus(1, circumference); }
  static GroupSpec su2(double radius = 1.0);
  static GroupSpec product(std::vector<GroupSpec> factors);
  static GroupSpec power(const GroupSpec& base, std::size_t n);
  /// Scaled(Scaled(G, a), b) collapses to Scaled(G, a * b); factor 1 is a no-op.
  static GroupSpec scaled(const GroupSpec& base, double factor);

  const Kind& kind() const noexcept { return kind_; }
  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&kind_);
  }

  /// Total scale applied on top of the unscaled group returned by unscaled().
  double scale() const noexcept;
  const GroupSpec& unscaled() const noexcept;

  /// Dimension of the Euclidean space receiving the isometric embedding.
  std::size_t embedding_dimension() const;

  bool operator==(const GroupSpec& other) const;

 private:
  explicit GroupSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

class GroupElement {
 public:
  using Coordinates = std::vector<double>;
  using Quaternion = Eigen::Quaterniond;
  using Tuple = std::vector<GroupElement>;
  using Value = std::variant<Coordinates, Quaternion, Tuple>;

  GroupElement() = default;
  explicit GroupElement(Coordinates c) : value_(std::move(c)) {}
  explicit GroupElement(const Quaternion& q) : value_(q) {}
  explicit GroupElement(Tuple t) : value_(std::move(t)) {}

  const Value& value() const noexcept { return value_; }
  const Coordinates& coordinates() const;
  const Quaternion& quaternion() const;
  const Tuple& factors() const;

  bool operator==(const GroupElement& other) const;

 private:
  Value value_;
};

using EmbeddedPoint = Eigen::VectorXd;

/// Throws std::invalid_argument if `g` is not an element of `G`.
void check_member(const GroupSpec& G, const GroupElement& g);
/// Torus coordinates reduced to [0, L); quaternions renormalised.
GroupElement canonicalize(const GroupSpec& G, const GroupElement& g);

double geodesic_distance(const GroupSpec& G, const GroupElement& g, const GroupElement& h);

GroupElement identity(const GroupSpec& G);
GroupElement group_op(const GroupSpec& G, const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupSpec& G, const GroupElement& g);

/// Haar-random element.
GroupElement random_element(const GroupSpec& G, std::mt19937_64& rng);

struct GroupNet {
  std::vector<GroupElement> points;
  /// Covering radius: exact for tori, measured against a dense sample for SU(2).
  double mesh = 0.0;
};

/// Finite net of `G` with size parameter q.
///
/// Tori get the subgroup grid {j L / q} in every coordinate (q^d points, a
/// genuine finite subgroup). SU(2) gets q points chosen by farthest-point
/// insertion from a fixed seeded candidate pool, starting at the identity, so
/// the net for q is a prefix of the net for q + 1. Products take the cartesian
/// product of factor nets.
GroupNet net(const GroupSpec& G, std::size_t q, std::uint64_t seed = 0x5eedULL);

/// Riemannian isometric embedding f: G -> E^k. Circles of circumference L map
/// to circles of radius L / 2pi; SU(2) of radius r maps to the sphere of radius
/// r in E^4; Scaled(G, C) uses C * f_G.
EmbeddedPoint nash_embed(const GroupSpec& G, const GroupElement& g);

/// Left inverse of nash_embed. Throws std::domain_error if `p` is farther than
/// 1e-6 from the embedded submanifold.
GroupElement nash_inverse(const GroupSpec& G, const EmbeddedPoint& p);

inline constexpr double kManifoldTolerance = 1e-6;

/// inf of |f(x) - f(y)| / d(x, y) over pairs with d(x, y) < threshold.
double local_embedding_distortion(const GroupSpec& G, double threshold);

double diameter(const GroupSpec& G);

/// Upper bound L on the Lipschitz constant of the inverse embedding f^{-1}
/// (arc over chord at antipodes: pi / 2 for circles and for SU(2)).
double inverse_lipschitz_bound(const GroupSpec& G);

/// True if every factor is a torus (possibly scaled); such groups are abelian.
bool is_abelian(const GroupSpec& G);

}  // namespace flatspace
