#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "flatspace/lie_group.hpp"
#include "flatspace/markov.hpp"
#include "flatspace/metric_space.hpp"
#include "flatspace/quotient.hpp"
#include "flatspace/tower.hpp"
#include "flatspace/transport.hpp"

namespace flatspace {

using json = nlohmann::json;

/// Malformed structured-text input; `field()` is the offending path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// {"labels": [...], "dist": [[...]]}
json to_json(const FiniteMetricSpace& x);
FiniteMetricSpace metric_space_from_json(const json& j);
/// Rows "label_i,label_j,distance" for i < j, with a header line.
std::string to_csv(const FiniteMetricSpace& x);

/// {"atoms": [[coords]...], "weights": [...]}
json to_json(const EuclideanMeasure& mu);
EuclideanMeasure euclidean_measure_from_json(const json& j);

/// {"kind": "torus", "dims": d, "circumference": L or [L...]}, {"kind": "su2",
/// "radius": r}, {"kind": "product", "factors": [...]}, {"kind": "scaled",
/// "base": {...}, "factor": c}.
json to_json(const GroupSpec& G);
GroupSpec group_spec_from_json(const json& j, const std::string& path = "group");

/// Torus: coordinate array; SU(2): [w, x, y, z]; product: array of factors.
json to_json(const GroupSpec& G, const GroupElement& g);
GroupElement group_element_from_json(const GroupSpec& G, const json& j, const std::string& path = "point");

/// [{"matrix": [[...]], "translation": [...]}, ...] or {"permutations": [[...]]}.
json to_json(const FiniteIsometryGroup& G);
FiniteIsometryGroup isometry_group_from_json(const json& j, const std::string& path = "group");

/// Every field that affects results; `jobs` is left out on purpose.
json to_json(const TowerConfig& c);
/// Missing fields keep their defaults.
TowerConfig tower_config_from_json(const json& j, const std::string& path = "tower");

json to_json(const PipelineReport& r);
/// Rows "x_label,y_label,d_G,d_final,ratio".
std::string to_csv(const PipelineReport& r);

json to_json(const MappedConfiguration& cfg);
/// Summary without the per-row table.
json to_json(const MarkovReport& r);
/// Rows "trial,t,ratio,max_over_t"; vacuous entries are written as "vacuous".
std::string to_csv(const MarkovReport& r);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace flatspace
