#pragma once

#include "sgdg/scheme.hpp"

namespace sgdg {

struct ErrorReport {
  std::vector<std::string> variable;
  std::vector<double> l1, l2, linf;
  int mesh_n = 0;
  double wall_seconds = 0.0;
};

// quadrature-evaluated error norms of selected components against a sampler
ErrorReport error_norms(const DGField& field, const PointSampler& reference,
                        const std::vector<std::string>& names);

// log2 ratio for a mesh refinement by 2; infinite when the fine error hits zero
double convergence_order(double coarse, double fine);

// exact integral of the stored energy component (mode-0 sums)
double total_energy(const DGField& state);

struct EnergySample {
  double t = 0.0;
  double total = 0.0, kinetic = 0.0, internal = 0.0, gravitational = 0.0;
  double rho_dev_l2 = 0.0;  // L2 norm of rho - rho_e (perturbation amplitude)
};
struct EnergyHistory {
  std::vector<EnergySample> samples;
};

// component breakdown via the stage tables (kinetic + internal + gravitational
// sums to the stored total up to roundoff)
EnergySample energy_breakdown(const DGField& W, const StageContext& ctx, double t);

// max over radius bins (width h/2) of the spread of cell averages among
// cells at equal center distance
double radial_symmetry_deviation(const DGField& field, int comp,
                                 const std::array<double, 3>& center);

}  // namespace sgdg
