// Python bindings for the main operations: profile evaluation, quadrature,
// Riemann fluxes, the Poisson operator, and whole-scenario runs.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgdg/config.hpp"
#include "sgdg/equilibrium.hpp"
#include "sgdg/outputs.hpp"
#include "sgdg/version.hpp"

namespace py = pybind11;
using namespace sgdg;

namespace {

std::array<double, 3> to_vec3(const std::vector<double>& v) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (size_t i = 0; i < v.size() && i < 3; ++i) out[i] = v[i];
  return out;
}

py::dict run_scenario_py(const std::string& config_text, const std::string& output_dir) {
  ScenarioConfig cfg = parse_config(config_text);
  RunOutputs out = run_scenario(cfg);
  if (!output_dir.empty()) write_outputs(out, output_dir);
  py::dict d;
  d["scenario"] = cfg.scenario;
  d["steps"] = out.steps;
  d["energy_drift"] = out.energy_drift;
  d["initial_energy"] = out.initial_energy;
  d["invalid_states"] = out.invalid_states;
  d["limited_cells"] = out.limited_cells;
  d["radial_deviation"] = out.radial_deviation;
  d["wall_seconds"] = out.wall_seconds;
  py::list rows;
  for (const auto& r : out.errors) {
    py::dict row;
    row["variable"] = r.variable;
    row["mesh"] = r.mesh;
    row["l1"] = r.l1;
    row["l2"] = r.l2;
    row["linf"] = r.linf;
    if (r.has_order) {
      row["l1_order"] = r.l1_order;
      row["l2_order"] = r.l2_order;
      row["linf_order"] = r.linf_order;
    }
    rows.append(row);
  }
  d["errors"] = rows;
  py::list hist;
  for (const auto& s : out.energy.samples) {
    py::dict row;
    row["t"] = s.t;
    row["E_tot"] = s.total;
    row["E_kin"] = s.kinetic;
    row["E_int"] = s.internal;
    row["E_grav"] = s.gravitational;
    row["rho_dev_l2"] = s.rho_dev_l2;
    hist.append(row);
  }
  d["energy"] = hist;
  return d;
}

std::vector<double> hllc_py(const std::vector<double>& ul, const std::vector<double>& ur,
                            const std::vector<double>& n, double gamma) {
  const int dim = (int)ul.size() - 2;
  if (dim < 1 || dim > 3 || ur.size() != ul.size() || (int)n.size() != dim)
    throw ConfigError("states must be (rho, m..., E) with a dim-length normal");
  GasModel gas{gamma, 1.0};
  auto unpack = [dim](const std::vector<double>& v) {
    EulerState s;
    s.rho = v[0];
    for (int a = 0; a < dim; ++a) s.m[a] = v[1 + a];
    s.E = v[1 + dim];
    return s;
  };
  double out[5];
  hllc_flux(unpack(ul), unpack(ur), to_vec3(n), gas, dim, out);
  return std::vector<double>(out, out + dim + 2);
}

py::dict gauss_rules_py(int k) {
  QuadratureRule r = gauss_rules(k);
  py::dict d;
  d["nodes"] = r.gl_x;
  d["weights"] = r.gl_w;
  d["lobatto_nodes"] = r.lob_x;
  d["lobatto_weights"] = r.lob_w;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "structure-preserving DG solver for self-gravitating gas dynamics";
  m.attr("__version__") = kVersion;

  m.def("lane_emden_theta_3d", &lane_emden_theta_3d, py::arg("n"), py::arg("r"),
        "closed-form 3D Lane-Emden profile (n = 0, 1, 5)");
  m.def("lane_emden_theta_2d", &lane_emden_theta_2d, py::arg("r"),
        "2D (n = 1) profile in Bessel-integral form");
  m.def("gauss_rules", &gauss_rules_py, py::arg("k"),
        "1D Gauss-Legendre rule with k+1 points plus its Gauss-Lobatto companion");
  m.def("hllc_flux", &hllc_py, py::arg("ul"), py::arg("ur"), py::arg("n"), py::arg("gamma"),
        "multidimensional HLLC flux of two conserved states");
  m.def("list_scenarios", [] { return scenario_ids(); });
  m.def("config_defaults",
        [](const std::string& id) { return config_to_text(scenario_defaults(id)); },
        py::arg("scenario"));
  m.def("run_scenario", &run_scenario_py, py::arg("config_text"), py::arg("output_dir") = "",
        "parse a config, run the scenario, optionally write outputs; returns a summary dict");

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "NumericalError");
}
