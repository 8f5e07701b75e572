#pragma once

#include <memory>
#include <utility>

#include "sgdg/errors.hpp"

#include "sgdg/equilibrium.hpp"
#include "sgdg/limiters.hpp"

namespace sgdg {

enum class SchemeKind { StructurePreserving, Standard };
enum class GravitySource { Full, BackgroundSubtracted };

using SpatialTimeFn = std::function<double(const std::array<double, 3>& x, double t)>;

struct SchemeConfig {
  GasModel gas;
  PenaltyParams pen;
  double cfl = 0.15;
  int rk_order = 3;
  bool oe = false;
  bool pp = false;
  D2Variant d2 = D2Variant::SBP;
  GravitySource gmode = GravitySource::Full;
  double pp_floor = 1e-13;
  int threads = 1;
};

// scenario-supplied closures for Exact ghosts and potential boundary data
struct BoundaryClosure {
  // conserved (rho, m..., E) at a ghost point; null -> equilibrium state
  std::function<void(const std::array<double, 3>& x, double t, double* cons)> exact_state;
  SpatialTimeFn phi_delta_data;  // Dirichlet data for the perturbation potential (default 0)
  SpatialTimeFn phi_dot_data;    // Dirichlet data for the potential rate (default 0)
};

// Everything recovered from the stage state before the residual is formed.
struct StageContext {
  double time = 0.0;
  DGField phi_delta, g_delta;   // perturbation potential pair (solver basis)
  DGField phi, g;               // equilibrium + perturbation
  DGField phi_dot, g_dot;       // potential rate pair
  DGField energy;               // recovered non-gravitational energy (hydro basis)
  DGField grav_product;         // quadrature projection of rho_grav*phi/2
  // face tables in the canonical (+axis) orientation
  std::vector<double> flux;     // [(face*nq + mu)*ncomp + c]
  std::vector<double> pe_avg;   // [face*nq + mu]
  std::vector<double> fg_face;  // [face*nq + mu]
  // volume tables
  std::vector<double> vol_p;    // [e*nq_vol + q]
  // per-element cell-average primitives
  std::vector<double> ubar;     // [e*3 + a]
  std::vector<double> cbar;     // [e]
  std::vector<double> ratio;    // cell-average density over equilibrium average
  long invalid_states = 0;
};

// state labels inside a conserved field
inline constexpr int comp_rho = 0;
inline int comp_energy(int dim) { return dim + 1; }

class SpScheme {
 public:
  SpScheme(const CartesianMesh& mesh, const BasisSet& hydro, const PoissonSystem& sys,
           const EquilibriumField& eq, const SchemeConfig& cfg, BoundaryClosure closure);

  // project the initial data and attach the gravitational energy
  DGField initialize(const PointSampler& cons0, double t0 = 0.0) const;

  // Recovers the stage quantities. When the positivity limiter is enabled it
  // runs here, right after the energy recovery, so the pressures certified by
  // the limiter are exactly the ones the fluxes then consume.
  StageContext recover_stage(DGField& W, double t) const;
  DGField rhs(const DGField& W, const StageContext& ctx) const;
  double compute_dt(const StageContext& ctx) const;
  // oscillation damping hook, applied after every stage
  void post_stage(DGField& W, const StageContext& ctx, double dt) const;
  // one SSP-RK step (order from config); returns the step actually taken
  void step(DGField& W, double& t, double dt) const;
  // recover once, pick dt = min(cfl step, t_end - t), advance; returns dt
  double step_adaptive(DGField& W, double& t, double t_end) const;

  const EquilibriumField& equilibrium() const { return *eq_; }
  const SchemeConfig& config() const { return cfg_; }
  const CartesianMesh& mesh() const { return *mesh_; }
  const BasisSet& basis() const { return *basis_; }
  long invalid_count() const { return invalid_total_; }
  long limited_count() const { return limited_total_; }
  double rho0() const { return cfg_.gmode == GravitySource::BackgroundSubtracted ? eq_->rho0_subtracted : 0.0; }

  const DGField& equilibrium_state_field() const { return w_equilibrium_; }

 private:
  friend class StdScheme;
  void wave_speed_bounds(const DGField& W, const DGField& grav, std::vector<double>& beta,
                         std::vector<double>& ubar, std::vector<double>& cbar) const;
  DGField equilibrium_state() const;  // W at the discrete equilibrium
  StageContext recover_stage_potential_only(const DGField& W, double t) const;

  const CartesianMesh* mesh_;
  const BasisSet* basis_;
  const PoissonSystem* sys_;
  const EquilibriumField* eq_;
  SchemeConfig cfg_;
  BoundaryClosure closure_;
  std::vector<std::array<int, 6>> elem_faces_;  // face id per (axis, side), -1 if none
  DGField w_equilibrium_;
  std::shared_ptr<void> etab_;  // cached equilibrium volume tables
  mutable long invalid_total_ = 0;
  mutable long limited_total_ = 0;
};

// Baseline scheme: conserved (rho, m, E), plain HLLC, unsplit gravity source.
class StdScheme {
 public:
  StdScheme(const CartesianMesh& mesh, const BasisSet& hydro, const PoissonSystem& sys,
            const EquilibriumField& eq, const SchemeConfig& cfg, BoundaryClosure closure);

  DGField initialize(const PointSampler& cons0) const;
  DGField rhs(DGField& U, double t, StageContext* ctx_out) const;
  double compute_dt(const StageContext& ctx) const;
  double cfl_step(const DGField& U) const;  // from cell averages only
  void post_stage(DGField& U, const StageContext& ctx, double dt) const;
  void step(DGField& U, double& t, double dt) const;
  double step_adaptive(DGField& U, double& t, double t_end) const;

  const CartesianMesh& mesh() const { return *mesh_; }
  long invalid_count() const { return invalid_total_; }
  // diagnostic total energy E + rho_grav phi/2 for comparison plots
  double diagnostic_total_energy(const DGField& U) const;

 private:
  const CartesianMesh* mesh_;
  const BasisSet* basis_;
  const PoissonSystem* sys_;
  const EquilibriumField* eq_;
  SchemeConfig cfg_;
  BoundaryClosure closure_;
  std::vector<std::array<int, 6>> elem_faces_;
  mutable long invalid_total_ = 0;
};

std::vector<std::array<int, 6>> build_elem_faces(const CartesianMesh& mesh);

// stable default CFL for the diameter-based step formula
double default_cfl(int degree, int dim);

namespace detail {
inline void lincomb(double& y, double a, const double& x, double b, const double& z) {
  y = a * x + b * z;
}
inline void lincomb(DGField& y, double a, const DGField& x, double b, const DGField& z) {
  for (size_t i = 0; i < y.coeff.size(); ++i) y.coeff[i] = a * x.coeff[i] + b * z.coeff[i];
}
}  // namespace detail

// Shared SSP-RK driver: convex combinations of forward-Euler stages exactly
// as printed for orders 1-3, with the damping hook applied after each stage.
// L(state, stage_time) -> time derivative (may adjust the stage state in
// place, e.g. positivity limiting during recovery); hook(state) damps.
template <class State, class Rhs, class Hook>
void ssp_rk_step(State& w, double t, double dt, int order, Rhs&& L, Hook&& hook) {
  using detail::lincomb;
  State k = L(w, t);
  State w1 = w;
  lincomb(w1, 1.0, w, dt, k);
  hook(w1);
  if (order == 1) {
    w = std::move(w1);
    return;
  }
  State k1 = L(w1, t + dt);
  if (order == 2) {
    State tmp = w1;
    lincomb(tmp, 1.0, w1, dt, k1);
    lincomb(w, 0.5, w, 0.5, tmp);
    hook(w);
    return;
  }
  if (order == 3) {
    State w2 = w1;
    lincomb(w2, 1.0, w1, dt, k1);        // w1 + dt L(w1)
    lincomb(w2, 0.75, w, 0.25, w2);      // 3/4 w + 1/4 (...)
    hook(w2);
    State k2 = L(w2, t + 0.5 * dt);
    State tmp = w2;
    lincomb(tmp, 1.0, w2, dt, k2);
    lincomb(w, 1.0 / 3.0, w, 2.0 / 3.0, tmp);
    hook(w);
    return;
  }
  throw ConfigError("unsupported Runge-Kutta order " + std::to_string(order));
}

}  // namespace sgdg
