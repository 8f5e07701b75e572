#pragma once

#include <memory>

#include "sgdg/config.hpp"
#include "sgdg/diagnostics.hpp"

namespace sgdg {

struct ErrorTableRow {
  std::string variable;
  int mesh = 0;
  double l1 = 0.0, l1_order = 0.0;
  double l2 = 0.0, l2_order = 0.0;
  double linf = 0.0, linf_order = 0.0;
  bool has_order = false;
};

// keep-alives for the final-state fields
struct RunArtifacts {
  std::shared_ptr<CartesianMesh> mesh;
  std::shared_ptr<BasisSet> basis;
  std::shared_ptr<BasisSet> solver_basis;
  std::shared_ptr<PoissonSystem> sys;
  std::shared_ptr<EquilibriumField> eq;
};

struct RunOutputs {
  ScenarioConfig config;
  std::vector<ErrorTableRow> errors;
  EnergyHistory energy;
  long invalid_states = 0;
  long limited_cells = 0;
  double energy_drift = 0.0;       // max |E_tot(t) - E_tot(0)| over the run
  double initial_energy = 0.0;
  double radial_deviation = -1.0;  // final density deviation (2D radial scenarios)
  long steps = 0;
  double wall_seconds = 0.0;

  RunArtifacts art;   // of the finest mesh run
  DGField state;      // final conserved field
  DGField phi;        // recovered potential at the final time
  std::vector<double> cell_pressure;  // final cell-center pressures
  bool structure_preserving = true;
};

RunOutputs run_scenario(const ScenarioConfig& cfg);

}  // namespace sgdg
