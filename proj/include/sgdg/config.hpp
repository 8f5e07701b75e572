#pragma once

#include <string>
#include <vector>

#include "sgdg/scheme.hpp"

namespace sgdg {

// Declarative run description. Parsed from line-oriented `key = value` text
// with `#` comments and an optional `[scenario]` section header; every field
// has a scenario-specific default.
struct ScenarioConfig {
  std::string scenario;

  // physics constants
  double kappa = 1.0;
  double G = 1.0;
  double lambda = 1.0;
  int n = 1;
  double gamma = 2.0;
  double rho0 = 1.0;
  double mu = 0.0;  // perturbation amplitude

  std::vector<int> meshes;
  int degree = 2;
  BasisTrunc trunc = BasisTrunc::TotalDegree;
  SchemeKind scheme = SchemeKind::StructurePreserving;
  int rk_order = 3;
  bool oe = false;
  bool pp = false;
  D2Variant d2 = D2Variant::SBP;
  double t_end = 1.0;
  double cfl = 0.0;  // 0 -> stable default for (degree, dim)
  double pp_floor = 1e-13;
  int out_every = 1;  // history sampling stride, in steps

  std::string output_dir = "out";
  int threads = 1;
  bool paper_scale = false;

  bool operator==(const ScenarioConfig&) const = default;
};

// all registered scenario ids
const std::vector<std::string>& scenario_ids();

// defaults for one scenario (desk scale)
ScenarioConfig scenario_defaults(const std::string& id);

// parse config text; unknown keys and out-of-range values raise ConfigError
ScenarioConfig parse_config(const std::string& text);

// serialize so that parse_config round-trips to an identical config
std::string config_to_text(const ScenarioConfig& cfg);

}  // namespace sgdg
