#include "flatspace/serialization.hpp"

#include <charconv>
#include <sstream>

namespace flatspace {

namespace {

template <class T>
T read(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, std::string("wrong type (") + j.type_name() + ")");
  }
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key, "missing field");
  return *it;
}

template <class T>
T field(const json& j, const std::string& key, const std::string& path) {
  return read<T>(require(j, key, path), path + "." + key);
}

template <class T>
T field_or(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  return it == j.end() ? fallback : read<T>(*it, path + "." + key);
}

// Wraps domain validation failures so that callers see the field path.
template <class Fn>
auto checked(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from(const json& j, const std::string& path) {
  auto v = read<std::vector<double>>(j, path);
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------

json to_json(const FiniteMetricSpace& x) { return json{{"labels", x.labels()}, {"dist", x.distances().rows()}}; }

FiniteMetricSpace metric_space_from_json(const json& j) {
  auto labels = field<std::vector<std::string>>(j, "labels", "space");
  auto dist = field<std::vector<std::vector<double>>>(j, "dist", "space");
  return checked("space", [&] { return FiniteMetricSpace(std::move(labels), DistanceMatrix(dist)); });
}

std::string to_csv(const FiniteMetricSpace& x) {
  std::string out = "label_i,label_j,distance\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      out += csv_field(x.labels()[i]) + "," + csv_field(x.labels()[j]) + "," + format_double(x(i, j)) + "\n";
  return out;
}

json to_json(const EuclideanMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back(vector_json(a));
  return json{{"atoms", atoms}, {"weights", mu.weights()}};
}

EuclideanMeasure euclidean_measure_from_json(const json& j) {
  const json& atoms = require(j, "atoms", "measure");
  if (!atoms.is_array()) throw ConfigError("measure.atoms", "expected an array");
  std::vector<Point> points;
  for (std::size_t k = 0; k < atoms.size(); ++k)
    points.push_back(vector_from(atoms[k], "measure.atoms[" + std::to_string(k) + "]"));
  auto weights = field<std::vector<double>>(j, "weights", "measure");
  return checked("measure", [&] { return EuclideanMeasure(std::move(points), std::move(weights)); });
}

// ---------------------------------------------------------------------------

json to_json(const GroupSpec& G) {
  if (const auto* t = G.as<TorusSpec>()) {
    const bool uniform = std::all_of(t->circumference.begin(), t->circumference.end(),
                                     [&](double L) { return L == t->circumference.front(); });
    json c = uniform ? json(t->circumference.front()) : json(t->circumference);
    return json{{"kind", "torus"}, {"dims", t->dims()}, {"circumference", c}};
  }
  if (const auto* s = G.as<SU2Spec>()) return json{{"kind", "su2"}, {"radius", s->radius}};
  if (const auto* p = G.as<ProductSpec>()) {
    json factors = json::array();
    for (const auto& f : p->factors) factors.push_back(to_json(f));
    return json{{"kind", "product"}, {"factors", factors}};
  }
  const auto* s = G.as<ScaledSpec>();
  return json{{"kind", "scaled"}, {"base", to_json(*s->base)}, {"factor", s->factor}};
}

GroupSpec group_spec_from_json(const json& j, const std::string& path) {
  const auto kind = field<std::string>(j, "kind", path);
  return checked(path, [&]() -> GroupSpec {
    if (kind == "torus") {
      const auto dims = field_or<std::size_t>(j, "dims", path, 0);
      const json& c = require(j, "circumference", path);
      if (c.is_array()) {
        auto values = read<std::vector<double>>(c, path + ".circumference");
        if (dims != 0 && dims != values.size())
          throw ConfigError(path + ".dims", "does not match the circumference list");
        return GroupSpec::torus(std::move(values));
      }
      return GroupSpec::torus(dims == 0 ? 1 : dims, read<double>(c, path + ".circumference"));
    }
    if (kind == "circle") return GroupSpec::circle(field<double>(j, "circumference", path));
    if (kind == "su2") return GroupSpec::su2(field_or<double>(j, "radius", path, 1.0));
    if (kind == "product") {
      const json& f = require(j, "factors", path);
      if (!f.is_array()) throw ConfigError(path + ".factors", "expected an array");
      std::vector<GroupSpec> factors;
      for (std::size_t k = 0; k < f.size(); ++k)
        factors.push_back(group_spec_from_json(f[k], path + ".factors[" + std::to_string(k) + "]"));
      return GroupSpec::product(std::move(factors));
    }
    if (kind == "power")
      return GroupSpec::power(group_spec_from_json(require(j, "base", path), path + ".base"),
                              field<std::size_t>(j, "n", path));
    if (kind == "scaled")
      return GroupSpec::scaled(group_spec_from_json(require(j, "base", path), path + ".base"),
                               field<double>(j, "factor", path));
    throw ConfigError(path + ".kind", "unknown group kind '" + kind + "'");
  });
}

json to_json(const GroupSpec& G, const GroupElement& g) {
  if (G.as<TorusSpec>()) return json(g.coordinates());
  if (G.as<SU2Spec>()) {
    const auto& q = g.quaternion();
    return json{q.w(), q.x(), q.y(), q.z()};
  }
  if (const auto* p = G.as<ProductSpec>()) {
    json out = json::array();
    for (std::size_t k = 0; k < p->factors.size(); ++k) out.push_back(to_json(p->factors[k], g.factors().at(k)));
    return out;
  }
  return to_json(*G.as<ScaledSpec>()->base, g);
}

GroupElement group_element_from_json(const GroupSpec& G, const json& j, const std::string& path) {
  GroupElement g;
  if (G.as<TorusSpec>()) {
    // A bare number is accepted for circles.
    g = GroupElement(j.is_number() ? std::vector<double>{j.get<double>()} : read<std::vector<double>>(j, path));
  } else if (G.as<SU2Spec>()) {
    auto c = read<std::vector<double>>(j, path);
    if (c.size() != 4) throw ConfigError(path, "quaternion needs 4 components");
    g = GroupElement(Eigen::Quaterniond(c[0], c[1], c[2], c[3]));
  } else if (const auto* p = G.as<ProductSpec>()) {
    if (!j.is_array() || j.size() != p->factors.size()) throw ConfigError(path, "expected one entry per factor");
    GroupElement::Tuple t;
    for (std::size_t k = 0; k < p->factors.size(); ++k)
      t.push_back(group_element_from_json(p->factors[k], j[k], path + "[" + std::to_string(k) + "]"));
    g = GroupElement(std::move(t));
  } else {
    return group_element_from_json(*G.as<ScaledSpec>()->base, j, path);
  }
  return checked(path, [&] {
    check_member(G, g);
    return canonicalize(G, g);
  });
}

// ---------------------------------------------------------------------------

json to_json(const FiniteIsometryGroup& G) {
  json out = json::array();
  for (const auto& g : G.elements()) {
    json m = json::array();
    for (Eigen::Index r = 0; r < g.orthogonal().rows(); ++r) m.push_back(vector_json(g.orthogonal().row(r).transpose()));
    out.push_back(json{{"matrix", m}, {"translation", vector_json(g.translation())}});
  }
  return out;
}

FiniteIsometryGroup isometry_group_from_json(const json& j, const std::string& path) {
  if (j.is_object()) {
    if (j.contains("symmetric")) {
      const auto m = field<std::size_t>(j, "symmetric", path);
      return checked(path, [&] { return FiniteIsometryGroup::symmetric_group(m); });
    }
    auto perms = field<std::vector<std::vector<std::size_t>>>(j, "permutations", path);
    return checked(path, [&] { return FiniteIsometryGroup::from_permutations(perms); });
  }
  if (!j.is_array()) throw ConfigError(path, "expected a list of isometries or a permutation object");
  std::vector<EuclideanIsometry> elems;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    auto rows = field<std::vector<std::vector<double>>>(j[k], "matrix", p);
    Eigen::VectorXd t = vector_from(require(j[k], "translation", p), p + ".translation");
    Eigen::MatrixXd q(static_cast<Eigen::Index>(rows.size()), t.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != t.size()) throw ConfigError(p + ".matrix", "ragged matrix");
      for (Eigen::Index c = 0; c < t.size(); ++c) q(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
    elems.push_back(checked(p, [&] { return EuclideanIsometry(std::move(q), std::move(t)); }));
  }
  return checked(path, [&] { return FiniteIsometryGroup(std::move(elems)); });
}

// ---------------------------------------------------------------------------

json to_json(const TowerConfig& c) {
  return json{{"group", to_json(c.group)},         {"depth", c.depth},
              {"net_sizes", c.net_sizes},          {"strategy", to_string(c.strategy)},
              {"seed", c.seed},                    {"atom_cap", c.atom_cap},
              {"level_diagnostics", c.level_diagnostics}};
}

TowerConfig tower_config_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  TowerConfig c;
  if (j.contains("group")) c.group = group_spec_from_json(j["group"], path + ".group");
  c.depth = field_or<int>(j, "depth", path, c.depth);
  c.net_sizes = field_or<std::vector<std::size_t>>(j, "net_sizes", path, c.net_sizes);
  if (j.contains("strategy"))
    c.strategy = checked(path + ".strategy",
                         [&] { return net_strategy_from_string(field<std::string>(j, "strategy", path)); });
  c.seed = field_or<std::uint64_t>(j, "seed", path, c.seed);
  c.atom_cap = field_or<std::size_t>(j, "atom_cap", path, c.atom_cap);
  c.level_diagnostics = field_or<bool>(j, "level_diagnostics", path, c.level_diagnostics);
  checked(path, [&] {
    c.validate();
    return 0;
  });
  return c;
}

json to_json(const PipelineReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs)
    pairs.push_back(json{{"x", r.labels[p.i]},
                         {"y", r.labels[p.j]},
                         {"d_G", p.group_distance},
                         {"d_final", p.final_distance},
                         {"ratio", p.ratio},
                         {"level_w2", p.level_w2}});
  return json{{"config", to_json(r.config)},
              {"labels", r.labels},
              {"atoms_per_level", r.atoms_per_level},
              {"final_atoms", r.final_atoms},
              {"ambient_dimension", r.ambient_dimension},
              {"level_mesh", r.level_mesh},
              {"net_error_bound", r.net_error_bound},
              {"within_net_bound", r.within_net_bound},
              {"projection_error", r.projection_error},
              {"distortion", r.distortion},
              {"pairs", pairs},
              {"timings",
               {{"lift_seconds", r.timings.lift_seconds},
                {"embed_seconds", r.timings.embed_seconds},
                {"distance_seconds", r.timings.distance_seconds}}}};
}

std::string to_csv(const PipelineReport& r) {
  std::string out = "x_label,y_label,d_G,d_final,ratio\n";
  for (const auto& p : r.pairs)
    out += csv_field(r.labels[p.i]) + "," + csv_field(r.labels[p.j]) + "," + format_double(p.group_distance) + "," +
           format_double(p.final_distance) + "," + format_double(p.ratio) + "\n";
  return out;
}

// ---------------------------------------------------------------------------

json to_json(const MappedConfiguration& cfg) {
  const auto& a = cfg.chain.transition();
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) rows.push_back(vector_json(a.row(i).transpose()));
  return json{{"space", cfg.space},
              {"pi", vector_json(cfg.chain.pi())},
              {"transition", rows},
              {"images", cfg.images},
              {"distances", cfg.distances.rows()}};
}

json to_json(const MarkovReport& r) {
  json out{{"K", r.K},
           {"t_max", r.t_max},
           {"trials", r.trials},
           {"seed", r.seed},
           {"max_ratio", r.max_ratio},
           {"vacuous_trials", r.vacuous_trials},
           {"all_vacuous", r.all_vacuous},
           {"passed", r.passed}};
  if (r.argmax_trial) {
    out["argmax"] = json{{"trial", *r.argmax_trial}, {"t", r.argmax_t}};
    out["worst"] = to_json(*r.worst);
  }
  return out;
}

std::string to_csv(const MarkovReport& r) {
  auto text = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("vacuous"); };
  std::string out = "trial,t,ratio,max_over_t\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.trial) + "," + std::to_string(row.t) + "," + text(row.ratio) + "," +
           text(row.max_over_t) + "\n";
  return out;
}

}  // namespace flatspace
