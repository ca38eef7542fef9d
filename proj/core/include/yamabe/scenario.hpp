#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "yamabe/metric.hpp"

namespace yamabe {

/// A named geometry: ambient metric, embedding, evaluation points and scope
/// tags. Tags are verified numerically at load time:
///   flat             R-bar = 0 at the sample points
///   conformally_flat W-bar = 0
///   einstein         Ric-bar - (scal-bar/dim) g = 0
///   closed           chart is 2*pi-periodic (metric and embedding sampled)
struct Scenario {
  std::string id;
  int ambient_dim = 4;
  MetricField metric;
  Embedding embedding;
  std::vector<std::vector<double>> points;
  std::optional<ScalarField> conformal_factor;
  std::vector<std::string> tags;
  std::map<std::string, double> params;
  int grid = 32;  // quadrature resolution for closed scenarios

  int n() const { return ambient_dim - 1; }
  bool has_tag(const std::string& t) const;
};

/// Built-in catalog. Parameters: rho (spheres), a (cylinders), eps
/// (perturbations / graph amplitude). Unknown names throw ScopeError.
Scenario make_scenario(const std::string& name,
                       const std::map<std::string, double>& params = {});

const std::vector<std::string>& scenario_catalog_names();

/// Parses a scenario from its JSON representation (see README for the schema);
/// either an object or a catalog reference {"catalog": name, "params": {...}}.
Scenario scenario_from_json(const std::string& json_text);

struct TagDiagnostic {
  std::string tag;
  bool verified = false;
  double residual = 0.0;
};

/// Verifies every declared tag at the scenario's points (or default samples).
/// Throws ScopeError when `strict` and a tag fails.
std::vector<TagDiagnostic> validate_tags(const Scenario& s, bool strict);

}  // namespace yamabe
