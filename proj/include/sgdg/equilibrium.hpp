#pragma once

#include <functional>

#include "sgdg/euler.hpp"
#include "sgdg/poisson.hpp"

namespace sgdg {

// closed-form Lane-Emden profiles in 3D (n = 0, 1, 5)
double lane_emden_theta_3d(int n, double r);
double lane_emden_theta_3d_deriv(int n, double r);
// 2D (n = 1) profile in Bessel-integral form, fixed high-order quadrature
double lane_emden_theta_2d(double r);
double lane_emden_theta_2d_deriv(double r);

enum class PolytropeSymmetry { Radial, Planar };

// polytropic hydrostatic state p = kappa rho^gamma, rho = lambda theta^n.
// Radial uses the Lane-Emden profiles; Planar (n = 1 only) uses the
// one-dimensional profile sin(s/a) along the domain diagonal.
struct PolytropeSpec {
  double kappa = 1.0;
  double lambda = 1.0;
  int n = 1;
  double G = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  PolytropeSymmetry symmetry = PolytropeSymmetry::Radial;

  double gamma() const { return (n + 1.0) / n; }
  double scale_length() const;  // a = sqrt(kappa (n+1) lambda^((1-n)/n) / (4 pi G))
};

using ScalarSampler = std::function<double(const std::array<double, 3>&)>;
using VectorSampler = std::function<std::array<double, 3>(const std::array<double, 3>&)>;

// Discrete steady state: projected density/pressure, the potential pair from
// the shared Poisson operator, static interface tables, and the analytic
// samplers behind them.
struct EquilibriumField {
  const CartesianMesh* mesh = nullptr;
  const BasisSet* basis = nullptr;  // hydro basis

  ScalarSampler rho_sampler, p_sampler, phi_sampler;
  VectorSampler grad_p_sampler;  // analytic, diagnostics only

  DGField rho_h, p_h;        // projections onto the hydro basis
  PoissonSolution potential; // (phi_h, g_h) on the solver basis
  DGField etot_h;            // p_h/(gamma-1) + P(1/2 rho_grav phi)

  std::vector<double> rho_avg;  // per element
  double rho0_subtracted = 0.0; // background density removed from the Poisson source

  // static face-node tables (canonical orientation: index 0 = left/low side)
  std::vector<double> pe_face[2], rhoe_face[2], ee_face[2];
  // static LDG traces of (phi_h, g_h)
  LdgTraces traces;

  double pe_at(int face, int mu, int side) const {
    return pe_face[side][(size_t)face * basis->nq_face + mu];
  }
};

// Polytropic equilibrium on the given mesh. The Poisson solve runs on
// `sys` (whose basis may be a tensor enrichment of `basis`). `rho0_subtract`
// removes a constant background from the gravity source.
EquilibriumField build_equilibrium(const PolytropeSpec& spec, const CartesianMesh& mesh,
                                   const BasisSet& basis, const PoissonSystem& sys,
                                   const GasModel& gas, double rho0_subtract = 0.0);

// Uniform state (rho0, p0) with background-subtracted gravity: phi = 0.
EquilibriumField build_uniform_equilibrium(double rho0, double p0, const CartesianMesh& mesh,
                                           const BasisSet& basis, const PoissonSystem& sys,
                                           const GasModel& gas);

}  // namespace sgdg
