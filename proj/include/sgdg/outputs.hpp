#pragma once

#include <string>

#include "sgdg/scenarios.hpp"

namespace sgdg {

// CSV/VTK/manifest emission. Layout per run directory:
//   errors.csv   variable,mesh,L1,L1_order,L2,L2_order,Linf,Linf_order
//   energy.csv   t,E_tot,E_kin,E_int,E_grav,rho_dev_l2
//   fields.vtk   legacy structured points, cell data
//   fields_quadrature.vtk  legacy structured grid, point data at GL nodes
//   manifest.txt resolved config (reparseable) + code revision + run stats
void write_outputs(const RunOutputs& out, const std::string& dir);

void write_error_csv(const std::vector<ErrorTableRow>& rows, const std::string& path);
void write_energy_csv(const EnergyHistory& hist, const std::string& path);

}  // namespace sgdg
