#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatspace/lie_group.hpp"
#include "flatspace/metric_space.hpp"
#include "flatspace/transport.hpp"

namespace flatspace {

/// How the acting set of each lift is discretised.
enum class NetStrategy {
  /// Image of net(G, q) under g -> (g^{w_0}, ..., g^{w_{2^i - 1}}) with Walsh
  /// signs w_j = (-1)^popcount(j). For tori this is a finite subgroup of the
  /// level group containing every shift the lifted delta measures need, and
  /// it keeps q points per level.
  Twisted,
  /// Cartesian product of net(G, q) over all 2^i coordinates of the level
  /// group: a genuine net of the level group, q^(2^i) points per level.
  Product,
};

const char* to_string(NetStrategy s);
NetStrategy net_strategy_from_string(const std::string& s);

struct TowerConfig {
  GroupSpec group = GroupSpec::circle(6.283185307179586);
  /// m; even, so that M = 2^(m/2) is an integer.
  int depth = 0;
  /// Size parameter q of the net used by lift i (i = 0..m-1).
  std::vector<std::size_t> net_sizes;
  NetStrategy strategy = NetStrategy::Twisted;
  std::uint64_t seed = 1;
  std::size_t atom_cap = 2048;
  /// Also compute geodesic W2 between the lifts at every level.
  bool level_diagnostics = true;
  unsigned jobs = 1;

  void validate() const;
  /// M = 2^(m/2).
  double lattice_scale() const;
};

/// Thrown when a lift would produce more atoms than the configured cap.
class AtomCapExceeded : public std::runtime_error {
 public:
  AtomCapExceeded(int level, std::size_t atoms, std::size_t cap);
  int level() const noexcept { return level_; }
  std::size_t atoms() const noexcept { return atoms_; }

 private:
  int level_;
  std::size_t atoms_;
};

/// Level-i point: 2^i coordinates in G, metric 2^(i/2) * sqrt(sum d_G^2).
using LevelAtom = std::vector<GroupElement>;

struct LiftedMeasure {
  int level = 0;
  std::vector<LevelAtom> atoms;
  std::vector<double> weights;
};

struct LevelNet {
  std::vector<LevelAtom> elements;
  /// Covering radius in the level metric along the discretised acting set.
  double mesh = 0.0;
};

/// Level groups G, sqrt2 G x sqrt2 G, (2G)^4, ..., (M G)^(M^2).
std::vector<GroupSpec> build_tower(const TowerConfig& config);

/// The nested element of build_tower(config)[level] corresponding to a flat atom.
GroupElement to_level_element(const LevelAtom& atom);

double level_scale(int level);
double level_distance(const GroupSpec& G, int level, const LevelAtom& a, const LevelAtom& b);

std::size_t level_net_size(const TowerConfig& config, int level);
LevelNet level_net(const TowerConfig& config, int level);

LiftedMeasure delta_measure(const GroupElement& x);

/// Atoms (k, k u) for k in the acting set and u an atom of mu; weights w(u)/|S|.
LiftedMeasure lift_measure(const LiftedMeasure& mu, const GroupSpec& G, const std::vector<LevelAtom>& acting);

/// (h1, h2) -> h1^{-1} h2, one level down.
LevelAtom fold(const GroupSpec& G, const LevelAtom& atom);

/// Concatenated scaled embeddings M f(g_j) of every atom.
EuclideanMeasure embed_level_m(const LiftedMeasure& mu, const TowerConfig& config);

/// Inverse embedding followed by m folds.
GroupElement project_back(const EmbeddedPoint& p, const TowerConfig& config);

/// Lift delta_x through all m levels, checking the atom cap on the way.
std::vector<LiftedMeasure> lift_delta(const GroupElement& x, const TowerConfig& config,
                                      const std::vector<LevelNet>& nets);

struct PairRecord {
  std::size_t i = 0;
  std::size_t j = 0;
  double group_distance = 0.0;
  double final_distance = 0.0;
  double ratio = 0.0;
  /// Geodesic W2 between the lifts at levels 0..m (empty without diagnostics).
  std::vector<double> level_w2;
};

struct StageTimings {
  double lift_seconds = 0.0;
  double embed_seconds = 0.0;
  double distance_seconds = 0.0;
};

struct PipelineReport {
  TowerConfig config;
  std::vector<std::string> labels;
  std::vector<std::size_t> atoms_per_level;
  std::size_t final_atoms = 0;
  std::size_t ambient_dimension = 0;
  std::vector<double> level_mesh;
  double net_error_bound = 0.0;
  bool within_net_bound = true;
  double projection_error = 0.0;
  std::vector<PairRecord> pairs;
  double distortion = 1.0;
  StageTimings timings;
};

/// Runs the full tower on the point set and measures the bi-Lipschitz
/// distortion of x -> (uniform measure on its level-m image) against d_G.
PipelineReport run_pipeline(const std::vector<GroupElement>& points, const TowerConfig& config,
                            std::vector<std::string> labels = {});

/// Exact final distance for tori with subgroup nets: the lifted deltas are
/// uniform on cosets of one finite subgroup T, so W2 is min over s in T of the
/// chordal length of s + t(y) - t(x). Needs no assignment and ignores the cap.
double abelian_lift_distance(const GroupElement& x, const GroupElement& y, const TowerConfig& config);

}  // namespace flatspace
