#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "output.hpp"

namespace flatspace::cli {

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(key, "missing");
  return j.at(key);
}

std::vector<std::string> labels_for(const json& cfg, std::size_t n) {
  auto labels = get_or<std::vector<std::string>>(cfg, "labels", {});
  if (labels.empty())
    for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
  if (labels.size() != n) throw ConfigError("labels", "expected " + std::to_string(n) + " labels");
  return labels;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& path) {
  std::vector<double> v;
  try {
    v = j.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError(path, "expected an array of numbers");
  }
  if (v.empty()) throw ConfigError(path, "empty vector");
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<Eigen::VectorXd> vectors_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector_from_json(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<GroupElement> group_points(const json& cfg, const GroupSpec& G, std::optional<std::uint64_t> seed) {
  std::vector<GroupElement> pts;
  if (cfg.contains("points")) {
    const auto& arr = cfg["points"];
    if (!arr.is_array()) throw ConfigError("points", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      pts.push_back(group_element_from_json(G, arr[i], "points[" + std::to_string(i) + "]"));
  } else if (cfg.contains("random_points")) {
    if (!seed) throw ConfigError("seed", "required with random_points");
    std::mt19937_64 rng(*seed);
    const auto n = get_or<std::size_t>(cfg, "random_points", 0);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(random_element(G, rng));
  } else {
    throw ConfigError("points", "give points or random_points");
  }
  return pts;
}

DistanceMatrix pairwise(std::size_t n, const std::function<double(std::size_t, std::size_t)>& d) {
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = m[j * n + i] = d(i, j);
  return DistanceMatrix(n, std::move(m));
}

// Library precondition failures on user data surface as config errors.
template <class F>
auto as_config_error(const char* field, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

json without_timings(json report) {
  report.erase("timings");
  return report;
}

}  // namespace

json load_config(const Options& opts) {
  if (!opts.config) return json::object();
  std::ifstream in(*opts.config);
  if (!in) throw ConfigError("--config", "cannot open " + opts.config->string());
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", e.what());
  }
  if (!cfg.is_object()) throw ConfigError("--config", "top level must be an object");
  if (opts.seed) cfg["seed"] = *opts.seed;
  return cfg;
}

int cmd_distance(const Options& opts) {
  if (!opts.config) throw ConfigError("--config", "required for distance");
  const json cfg = load_config(opts);
  const auto space = get_or<std::string>(cfg, "space", "geodesic");
  std::optional<std::uint64_t> seed;
  if (cfg.contains("seed")) seed.emplace(get_or<std::uint64_t>(cfg, "seed", 0));

  DistanceMatrix dist;
  std::size_t n = 0;
  if (space == "geodesic" || space == "chordal") {
    const auto G = group_spec_from_json(require(cfg, "group"));
    const auto pts = group_points(cfg, G, seed);
    n = pts.size();
    if (space == "geodesic") {
      dist = pairwise(n, [&](std::size_t i, std::size_t j) { return geodesic_distance(G, pts[i], pts[j]); });
    } else {
      std::vector<EmbeddedPoint> e;
      for (const auto& p : pts) e.push_back(nash_embed(G, p));
      dist = pairwise(n, [&](std::size_t i, std::size_t j) { return (e[i] - e[j]).norm(); });
    }
  } else if (space == "euclidean_quotient" || space == "compactified") {
    const auto G = isometry_group_from_json(require(cfg, "isometries"), "isometries");
    const auto pts = vectors_from_json(require(cfg, "points"), "points");
    n = pts.size();
    if (space == "euclidean_quotient") {
      dist = as_config_error("points", [&] {
        return pairwise(n, [&](std::size_t i, std::size_t j) { return euclidean_quotient_distance(pts[i], pts[j], G); });
      });
    } else {
      require(cfg, "lattice_scale");
      const double M = get_or<double>(cfg, "lattice_scale", 0.0);
      const auto shifts = as_config_error("lattice_scale", [&] {
        return LatticeShiftAction(M, pts.empty() ? 1 : static_cast<std::size_t>(pts.front().size()));
      });
      dist = as_config_error("points", [&] {
        return pairwise(n, [&](std::size_t i, std::size_t j) { return compactified_distance(pts[i], pts[j], G, shifts); });
      });
    }
  } else if (space == "perm_quotient") {
    const auto& arr = require(cfg, "points");
    if (!arr.is_array()) throw ConfigError("points", "expected an array of tuples");
    std::vector<TuplePoint<Eigen::VectorXd>> tuples;
    for (std::size_t i = 0; i < arr.size(); ++i) tuples.push_back(vectors_from_json(arr[i], "points[" + std::to_string(i) + "]"));
    n = tuples.size();
    dist = as_config_error("points", [&] {
      return pairwise(n, [&](std::size_t i, std::size_t j) {
        return perm_quotient_distance(tuples[i], tuples[j], euclidean_distance);
      });
    });
  } else if (space == "w2") {
    const auto& arr = require(cfg, "points");
    if (!arr.is_array()) throw ConfigError("points", "expected an array of measures");
    std::vector<EuclideanMeasure> mus;
    for (std::size_t i = 0; i < arr.size(); ++i)
      mus.push_back(as_config_error("points", [&] { return euclidean_measure_from_json(arr[i]); }));
    n = mus.size();
    dist = as_config_error("points", [&] {
      return pairwise(n, [&](std::size_t i, std::size_t j) {
        return w2_discrete(mus[i], mus[j], euclidean_distance).distance;
      });
    });
  } else {
    throw ConfigError("space", "unknown space '" + space + "'");
  }

  const auto labels = labels_for(cfg, n);
  // points identified by the chosen space do not form a metric space
  const auto x = as_config_error("points", [&] { return FiniteMetricSpace(labels, dist); });
  write_json(opts.out / "distance.json", cfg, to_json(x));
  write_csv(opts.out / "distance.csv", cfg, to_csv(x));
  std::printf("distance: %zu points in %s space, diameter %s\n", n, space.c_str(),
              format_double(dist.max_entry()).c_str());
  return kSuccess;
}

int cmd_tower(const Options& opts) {
  if (!opts.config) throw ConfigError("--config", "required for tower");
  json cfg = load_config(opts);
  json base = cfg.contains("tower") ? cfg["tower"] : json::object();
  if (!base.is_object()) throw ConfigError("tower", "expected an object");
  if (cfg.contains("seed")) base["seed"] = cfg["seed"];
  if (opts.cap) base["atom_cap"] = *opts.cap;
  const auto base_config = tower_config_from_json(base);
  const auto points = group_points(cfg, base_config.group, base_config.seed);
  const auto labels = labels_for(cfg, points.size());

  json sweep = cfg.contains("sweep") ? cfg["sweep"] : json::array();
  if (!sweep.is_array()) throw ConfigError("sweep", "expected an array of cells");
  std::vector<TowerConfig> cells;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    if (!sweep[k].is_object()) throw ConfigError("sweep[" + std::to_string(k) + "]", "expected an object");
    json merged = base;
    merged.update(sweep[k]);
    cells.push_back(tower_config_from_json(merged, "sweep[" + std::to_string(k) + "]"));
  }

  // the header records every resolved cell
  json resolved = cfg;
  resolved["tower"] = to_json(base_config);
  resolved["sweep"] = json::array();
  for (const auto& c : cells) resolved["sweep"].push_back(to_json(c));

  std::string table = "cell,depth,net_sizes,strategy,atoms,final_atoms,distortion,within_net_bound,status\n";
  for (std::size_t k = 0; k < cells.size(); ++k) {
    auto c = cells[k];
    c.jobs = opts.jobs;
    std::string sizes;
    for (std::size_t s : c.net_sizes) sizes += (sizes.empty() ? "" : ";") + std::to_string(s);
    std::string row = std::to_string(k) + "," + std::to_string(c.depth) + "," + sizes + "," + to_string(c.strategy) + ",";
    try {
      const auto r = run_pipeline(points, c, labels);
      row += std::to_string(r.atoms_per_level.empty() ? 1 : r.atoms_per_level.back()) + "," +
             std::to_string(r.final_atoms) + "," + format_double(r.distortion) + "," +
             (r.within_net_bound ? "true" : "false") + ",ok\n";
      json cell_config = resolved;
      cell_config["cell"] = k;
      write_json(opts.out / ("tower_cell_" + std::to_string(k) + ".json"), cell_config, without_timings(to_json(r)));
      write_csv(opts.out / ("tower_cell_" + std::to_string(k) + ".csv"), cell_config, to_csv(r));
      std::fprintf(stderr, "cell %zu: m=%d distortion %.6f (lift %.2fs, embed %.2fs, distances %.2fs)\n", k, c.depth,
                   r.distortion, r.timings.lift_seconds, r.timings.embed_seconds, r.timings.distance_seconds);
    } catch (const AtomCapExceeded& e) {
      row += std::to_string(e.atoms()) + ",,,,cap_exceeded_at_level_" + std::to_string(e.level()) + "\n";
      std::fprintf(stderr, "cell %zu: %s\n", k, e.what());
    }
    table += row;
  }
  write_csv(opts.out / "tower_sweep.csv", resolved, table);
  std::printf("tower: %zu cells over %zu points\n", cells.size(), points.size());
  return kSuccess;
}

int cmd_markov(const Options& opts) {
  const json cfg = load_config(opts);
  SamplerOptions s;
  if (cfg.contains("target"))
    s.target = as_config_error("target", [&] { return markov_target_from_string(get_or<std::string>(cfg, "target", "")); });
  s.min_states = get_or<std::size_t>(cfg, "min_states", s.min_states);
  s.max_states = get_or<std::size_t>(cfg, "max_states", s.max_states);
  s.dimension = get_or<std::size_t>(cfg, "dimension", s.dimension);
  s.scale = get_or<double>(cfg, "scale", s.scale);
  s.sparsity = get_or<double>(cfg, "sparsity", s.sparsity);
  const auto trials = get_or<std::size_t>(cfg, "trials", 100);
  const int t_max = get_or<int>(cfg, "t_max", 10);
  const double K = get_or<double>(cfg, "K", 1.0);
  const auto seed = get_or<std::uint64_t>(cfg, "seed", 1);
  if (t_max < 1) throw ConfigError("t_max", "must be at least 1");
  if (!(K > 0)) throw ConfigError("K", "must be positive");

  json resolved{{"target", to_string(s.target)}, {"min_states", s.min_states}, {"max_states", s.max_states},
                {"dimension", s.dimension},      {"scale", s.scale},           {"sparsity", s.sparsity},
                {"trials", trials},              {"t_max", t_max},             {"K", K},
                {"seed", seed}};
  const auto sampler = as_config_error("markov", [&] { return make_sampler(s); });
  const auto r = verify_markov_type2(sampler, trials, t_max, K, seed, opts.jobs);
  write_json(opts.out / "markov.json", resolved, to_json(r));
  write_csv(opts.out / "markov.csv", resolved, to_csv(r));
  std::printf("markov: %s target, %zu trials, max ratio %s vs K^2 = %s%s: %s\n", to_string(s.target), trials,
              format_double(r.max_ratio).c_str(), format_double(K * K).c_str(), r.all_vacuous ? " (all vacuous)" : "",
              r.passed ? "pass" : "FAIL");
  return r.passed ? kSuccess : kCheckFailed;
}

}  // namespace flatspace::cli
