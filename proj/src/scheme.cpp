#include "sgdg/scheme.hpp"

#include <cmath>

#include "sgdg/errors.hpp"
#include "sgdg/parallel.hpp"

namespace sgdg {

double default_cfl(int degree, int dim) {
  // the step formula uses the cell diameter and the max-norm wave speed, so
  // the 1/(2k+1) guidance shrinks by d*sqrt(d) in d dimensions
  const double base = 0.85 / (2.0 * degree + 1.0);
  return base / (dim * std::sqrt((double)dim));
}

std::vector<std::array<int, 6>> build_elem_faces(const CartesianMesh& mesh) {
  std::vector<std::array<int, 6>> ef(mesh.n_elements, {-1, -1, -1, -1, -1, -1});
  for (size_t i = 0; i < mesh.faces.size(); ++i) {
    const Face& f = mesh.faces[i];
    if (f.left >= 0) ef[f.left][f.axis * 2 + 1] = (int)i;
    if (f.right >= 0) ef[f.right][f.axis * 2 + 0] = (int)i;
  }
  return ef;
}

namespace {

struct EquilTables {
  // static per-run volume tables of the projected equilibrium
  std::vector<double> pe, rhoe;  // [e*nq + q]
  std::vector<double> gradpe;    // [(e*nq + q)*3 + a]
};

EquilTables build_equil_tables(const EquilibriumField& eq) {
  const CartesianMesh& mesh = *eq.mesh;
  const BasisSet& b = *eq.basis;
  EquilTables t;
  t.pe.resize((size_t)mesh.n_elements * b.nq_vol);
  t.rhoe.resize((size_t)mesh.n_elements * b.nq_vol);
  t.gradpe.assign((size_t)mesh.n_elements * b.nq_vol * 3, 0.0);
  for (int e = 0; e < mesh.n_elements; ++e)
    for (int q = 0; q < b.nq_vol; ++q) {
      const size_t id = (size_t)e * b.nq_vol + q;
      t.pe[id] = eq.p_h.eval_volume_node(e, 0, q);
      t.rhoe[id] = eq.rho_h.eval_volume_node(e, 0, q);
      const double* cm = eq.p_h.modes(e, 0);
      for (int a = 0; a < mesh.dim; ++a) {
        double s = 0.0;
        for (int m = 0; m < b.n_modes; ++m)
          s += cm[m] * b.vol_grad[((size_t)q * b.n_modes + m) * 3 + a];
        t.gradpe[id * 3 + a] = s;
      }
    }
  return t;
}

EulerState face_trace(const DGField& W, const DGField& energy, int e, int axis, int side, int mu,
                      int dim) {
  EulerState s;
  s.rho = W.eval_face_node(e, comp_rho, axis, side, mu);
  for (int a = 0; a < dim; ++a) s.m[a] = W.eval_face_node(e, 1 + a, axis, side, mu);
  s.E = energy.eval_face_node(e, comp_energy(dim), axis, side, mu);
  return s;
}

}  // namespace

SpScheme::SpScheme(const CartesianMesh& mesh, const BasisSet& hydro, const PoissonSystem& sys,
                   const EquilibriumField& eq, const SchemeConfig& cfg, BoundaryClosure closure)
    : mesh_(&mesh), basis_(&hydro), sys_(&sys), eq_(&eq), cfg_(cfg), closure_(std::move(closure)) {
  elem_faces_ = build_elem_faces(mesh);
  w_equilibrium_ = equilibrium_state();
  etab_ = std::make_shared<EquilTables>(build_equil_tables(eq));
}

DGField SpScheme::equilibrium_state() const {
  const int dim = mesh_->dim;
  DGField w(*mesh_, *basis_, dim + 2, FieldRole::Conserved);
  for (int e = 0; e < mesh_->n_elements; ++e)
    for (int m = 0; m < basis_->n_modes; ++m) {
      w.c(e, comp_rho, m) = eq_->rho_h.c(e, 0, m);
      w.c(e, comp_energy(dim), m) = eq_->etot_h.c(e, 0, m);
    }
  return w;
}

DGField SpScheme::initialize(const PointSampler& cons0, double t0) const {
  const int dim = mesh_->dim;
  DGField w = l2_project(*mesh_, *basis_, dim + 2, cons0, FieldRole::Conserved);
  StageContext ctx = recover_stage_potential_only(w, t0);
  // attach the gravitational part of the energy
  for (int e = 0; e < mesh_->n_elements; ++e)
    for (int m = 0; m < basis_->n_modes; ++m)
      w.c(e, comp_energy(dim), m) += ctx.grav_product.c(e, 0, m);
  return w;
}

double SpScheme::compute_dt(const StageContext& ctx) const {
  double speed = 0.0;
  for (int e = 0; e < mesh_->n_elements; ++e) {
    double umax = 0.0;
    for (int a = 0; a < mesh_->dim; ++a) umax = std::max(umax, std::abs(ctx.ubar[(size_t)e * 3 + a]));
    speed = std::max(speed, umax + ctx.cbar[e]);
  }
  if (!(speed > 0.0)) throw NumericalError("nonpositive wave speed in time-step estimate");
  const int k = basis_->degree;
  const double h = mesh_->diameter();
  const double ex = k <= 2 ? 1.0 : (k + 1.0) / 3.0;  // keep RK3 order on P3 runs
  return cfg_.cfl * std::pow(h, ex) / speed;
}

void SpScheme::wave_speed_bounds(const DGField& W, const DGField& grav, std::vector<double>& beta,
                                 std::vector<double>& ubar, std::vector<double>& cbar) const {
  const int dim = mesh_->dim;
  beta.assign((size_t)mesh_->n_elements * 3, 0.0);
  ubar.assign((size_t)mesh_->n_elements * 3, 0.0);
  cbar.assign(mesh_->n_elements, 0.0);
  for (int e = 0; e < mesh_->n_elements; ++e) {
    const double rho = W.cell_average(e, comp_rho);
    if (!(rho > 0.0))
      throw NumericalError("nonpositive cell-average density in element " + std::to_string(e));
    double ke = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double u = W.cell_average(e, 1 + a) / rho;
      ubar[(size_t)e * 3 + a] = u;
      ke += u * u;
    }
    const double ebar = W.cell_average(e, comp_energy(dim)) - grav.cell_average(e, 0);
    const double p = (cfg_.gas.gamma - 1.0) * (ebar - 0.5 * rho * ke);
    if (!(p > 0.0))
      throw NumericalError("nonpositive cell-average pressure in element " + std::to_string(e));
    const double c = std::sqrt(cfg_.gas.gamma * p / rho);
    cbar[e] = c;
    for (int a = 0; a < dim; ++a) beta[(size_t)e * 3 + a] = std::abs(ubar[(size_t)e * 3 + a]) + c;
  }
}

StageContext SpScheme::recover_stage_potential_only(const DGField& W, double t) const {
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& hb = *basis_;
  const BasisSet& sb = sys_->solver_basis();
  StageContext ctx;
  ctx.time = t;

  // perturbation source 4 pi G (rho - rho_e) from the coefficient difference,
  // so a state at the discrete equilibrium yields an exactly zero source
  DGField source(mesh, sb, 1);
  const double fourpig = 4.0 * M_PI * cfg_.gas.G;
  std::vector<double> diff(hb.n_modes);
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double* wr = W.modes(e, comp_rho);
    const double* er = eq_->rho_h.modes(e, 0);
    bool all_zero = true;
    for (int m = 0; m < hb.n_modes; ++m) {
      diff[m] = wr[m] - er[m];
      all_zero = all_zero && diff[m] == 0.0;
    }
    if (all_zero) continue;
    double* cm = source.modes(e, 0);
    for (int q = 0; q < sb.nq_vol; ++q) {
      double v = 0.0;
      for (int m = 0; m < hb.n_modes; ++m) v += diff[m] * hb.vol_value_row(q)[m];
      const double wj = sb.vol_w[q] * sb.jac * fourpig * v;
      const double* bv = sb.vol_value_row(q);
      for (int m = 0; m < sb.n_modes; ++m) cm[m] += wj * bv[m];
    }
  }
  const SpatialFn data_delta =
      closure_.phi_delta_data
          ? SpatialFn([this, t](const std::array<double, 3>& x) { return closure_.phi_delta_data(x, t); })
          : SpatialFn();
  PoissonSolution delta = sys_->solve_d1(source, data_delta);
  ctx.phi_delta = std::move(delta.phi);
  ctx.g_delta = std::move(delta.g);
  ctx.phi = ctx.phi_delta;
  ctx.g = ctx.g_delta;
  for (size_t i = 0; i < ctx.phi.coeff.size(); ++i)
    ctx.phi.coeff[i] += eq_->potential.phi.coeff[i];
  for (size_t i = 0; i < ctx.g.coeff.size(); ++i) ctx.g.coeff[i] += eq_->potential.g.coeff[i];

  ctx.grav_product = gravity_energy_projection(W, comp_rho, rho0(), ctx.phi);
  // full-width copy whose energy slot holds the recovered non-gravitational
  // energy, so face traces can be taken with one addressing scheme
  ctx.energy = W;
  const int ec = comp_energy(mesh.dim);
  for (int e = 0; e < mesh.n_elements; ++e)
    for (int m = 0; m < hb.n_modes; ++m) ctx.energy.c(e, ec, m) -= ctx.grav_product.c(e, 0, m);
  return ctx;
}

StageContext SpScheme::recover_stage(DGField& W, double t) const {
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& hb = *basis_;
  const int dim = mesh.dim;
  const int nc = dim + 2;
  StageContext ctx = recover_stage_potential_only(W, t);

  if (cfg_.pp) {
    limited_total_ += pp_limit(W, &ctx.grav_product, cfg_.gas, PPParams{cfg_.pp_floor});
    // refresh the recovered energy for the limited coefficients
    const int ec = comp_energy(mesh.dim);
    for (int e = 0; e < mesh.n_elements; ++e)
      for (int m = 0; m < hb.n_modes; ++m) {
        ctx.energy.c(e, comp_rho, m) = W.c(e, comp_rho, m);
        for (int a = 0; a < mesh.dim; ++a) ctx.energy.c(e, 1 + a, m) = W.c(e, 1 + a, m);
        ctx.energy.c(e, ec, m) = W.c(e, ec, m) - ctx.grav_product.c(e, 0, m);
      }
  }

  // volume pressure tables, validity accounting, cell-average primitives
  ctx.vol_p.assign((size_t)mesh.n_elements * hb.nq_vol, 0.0);
  std::vector<long> bad(mesh.n_elements, 0);
  parallel_for(mesh.n_elements, cfg_.threads, [&](int e) {
    for (int q = 0; q < hb.nq_vol; ++q) {
      EulerState s;
      s.rho = W.eval_volume_node(e, comp_rho, q);
      for (int a = 0; a < dim; ++a) s.m[a] = W.eval_volume_node(e, 1 + a, q);
      s.E = ctx.energy.eval_volume_node(e, comp_energy(dim), q);
      Primitive w = cons_to_prim(s, cfg_.gas, dim);
      if (!w.valid) {
        ++bad[e];
        w.p = std::max(w.p, cfg_.pp_floor);
      }
      ctx.vol_p[(size_t)e * hb.nq_vol + q] = w.p;
    }
  });
  long nbad = 0;
  for (long v : bad) nbad += v;
  if (nbad > 0 && !cfg_.pp)
    throw NumericalError("invalid recovered state at " + std::to_string(nbad) +
                         " quadrature nodes (enable the positivity limiter)");
  ctx.invalid_states += nbad;
  invalid_total_ += nbad;

  std::vector<double> beta;
  wave_speed_bounds(W, ctx.grav_product, beta, ctx.ubar, ctx.cbar);
  ctx.ratio.resize(mesh.n_elements);
  for (int e = 0; e < mesh.n_elements; ++e)
    ctx.ratio[e] = W.cell_average(e, comp_rho) / eq_->rho_avg[e];

  // interface fluxes (step 2): hydrostatically rescaled HLLC
  const int nfq = hb.nq_face;
  const size_t nfn = mesh.faces.size() * nfq;
  ctx.flux.assign(nfn * nc, 0.0);
  ctx.pe_avg.assign(nfn, 0.0);
  std::vector<long> badf(mesh.faces.size(), 0);
  parallel_for((int)mesh.faces.size(), cfg_.threads, [&](int fi) {
    const Face& f = mesh.faces[fi];
    const int a = f.axis;
    std::array<double, 3> n{0, 0, 0};
    n[a] = 1.0;
    double buf[5];
    for (int mu = 0; mu < nfq; ++mu) {
      const size_t id = (size_t)fi * nfq + mu;
      EulerState ul, ur;
      if (!f.boundary) {
        ul = face_trace(W, ctx.energy, f.left, a, 1, mu, dim);
        ur = face_trace(W, ctx.energy, f.right, a, 0, mu, dim);
      } else {
        const bool left_in = f.right < 0;
        const int e = left_in ? f.left : f.right;
        const int side = left_in ? 1 : 0;
        EulerState in = face_trace(W, ctx.energy, e, a, side, mu, dim);
        EulerState gh = in;
        if (f.tag == BoundaryTag::Reflecting) {
          gh.m[a] = -gh.m[a];
        } else if (f.tag == BoundaryTag::Exact) {
          const auto x = mesh.to_physical(e, hb.face_ref[(size_t)hb.slot(a, side) * nfq + mu]);
          double cons[5];
          if (closure_.exact_state) {
            closure_.exact_state(x, t, cons);
          } else {
            cons[0] = eq_->rho_sampler(x);
            for (int d = 0; d < dim; ++d) cons[1 + d] = 0.0;
            cons[1 + dim] = eq_->p_sampler(x) / (cfg_.gas.gamma - 1.0);
          }
          gh.rho = cons[0];
          for (int d = 0; d < dim; ++d) gh.m[d] = cons[1 + d];
          gh.E = cons[1 + dim];
        }
        ul = left_in ? in : gh;
        ur = left_in ? gh : in;
      }
      if (!(ul.rho > 0.0) || !(ur.rho > 0.0)) {
        ++badf[fi];
        ul.rho = std::max(ul.rho, cfg_.pp_floor);
        ur.rho = std::max(ur.rho, cfg_.pp_floor);
      }
      auto fix_pressure = [&](EulerState& s) {
        const Primitive w = cons_to_prim(s, cfg_.gas, dim);
        if (!w.valid) {
          ++badf[fi];
          double ke = 0.0;
          for (int d = 0; d < dim; ++d) ke += s.m[d] * s.m[d];
          s.E = cfg_.pp_floor / (cfg_.gas.gamma - 1.0) + 0.5 * ke / s.rho;
        }
      };
      fix_pressure(ul);
      fix_pressure(ur);
      ctx.pe_avg[id] = wb_hllc_flux(ul, ur, eq_->pe_at(fi, mu, 0), eq_->pe_at(fi, mu, 1), n,
                                    cfg_.gas, dim, buf);
      for (int c = 0; c < nc; ++c) ctx.flux[id * nc + c] = buf[c];
    }
  });
  long nbadf = 0;
  for (long v : badf) nbadf += v;
  if (nbadf > 0 && !cfg_.pp)
    throw NumericalError("invalid face trace states (enable the positivity limiter)");
  ctx.invalid_states += nbadf;
  invalid_total_ += nbadf;

  // potential rate (step 1 continued): needs the interface mass fluxes
  DGField mom(mesh, hb, dim, FieldRole::Auxiliary);
  for (int e = 0; e < mesh.n_elements; ++e)
    for (int a = 0; a < dim; ++a)
      for (int m = 0; m < hb.n_modes; ++m) mom.c(e, a, m) = W.c(e, 1 + a, m);
  FaceNodeTable mft;
  mft.v.resize(nfn);
  for (size_t i = 0; i < nfn; ++i) mft.v[i] = ctx.flux[i * nc + 0];
  const SpatialFn data_dot =
      closure_.phi_dot_data
          ? SpatialFn([this, t](const std::array<double, 3>& x) { return closure_.phi_dot_data(x, t); })
          : SpatialFn();
  PoissonSolution dot = sys_->solve_d2(mom, 4.0 * M_PI * cfg_.gas.G, cfg_.d2, &mft, data_dot);
  ctx.phi_dot = std::move(dot.phi);
  ctx.g_dot = std::move(dot.g);

  // interface energy flux (step 3)
  const SpatialFn data_delta =
      closure_.phi_delta_data
          ? SpatialFn([this, t](const std::array<double, 3>& x) { return closure_.phi_delta_data(x, t); })
          : SpatialFn();
  LdgTraces trd = ldg_traces(ctx.phi_delta, ctx.g_delta, cfg_.pen, data_delta);
  LdgTraces trt = ldg_traces(ctx.phi_dot, ctx.g_dot, cfg_.pen, data_dot);
  ctx.fg_face.assign(nfn, 0.0);
  const double c8 = 1.0 / (8.0 * M_PI * cfg_.gas.G);
  for (size_t i = 0; i < nfn; ++i) {
    const double ph = eq_->traces.phi_hat[i] + trd.phi_hat[i];
    const double gn = eq_->traces.ghat_n[i] + trd.ghat_n[i];
    ctx.fg_face[i] = c8 * (ph * trt.ghat_n[i] - trt.phi_hat[i] * gn) + ctx.flux[i * nc + 0] * ph;
  }
  return ctx;
}

DGField SpScheme::rhs(const DGField& W, const StageContext& ctx) const {
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& hb = *basis_;
  const BasisSet& sb = sys_->solver_basis();
  const int dim = mesh.dim;
  const int nc = dim + 2;
  const int nm = hb.n_modes;
  const EquilTables& et = *std::static_pointer_cast<EquilTables>(etab_);
  DGField out(mesh, hb, nc, FieldRole::Conserved);
  const double c8 = 1.0 / (8.0 * M_PI * cfg_.gas.G);

  parallel_for(mesh.n_elements, cfg_.threads, [&](int e) {
    double flx[3][5];
    // volume integrals: physical flux + energy flux + the pointwise sources
    for (int q = 0; q < hb.nq_vol; ++q) {
      const size_t id = (size_t)e * hb.nq_vol + q;
      const double rho = W.eval_volume_node(e, comp_rho, q);
      double m[3] = {0, 0, 0}, u[3] = {0, 0, 0};
      for (int a = 0; a < dim; ++a) {
        m[a] = W.eval_volume_node(e, 1 + a, q);
        u[a] = m[a] / rho;
      }
      const double en = ctx.energy.eval_volume_node(e, comp_energy(dim), q);
      const double p = ctx.vol_p[id];
      const double phi = ctx.phi.eval_volume_node(e, 0, q);
      const double phidot = ctx.phi_dot.eval_volume_node(e, 0, q);
      const double ratio = ctx.ratio[e];
      for (int a = 0; a < dim; ++a) {
        const double ga = ctx.g.eval_volume_node(e, a, q);
        const double gdota = ctx.g_dot.eval_volume_node(e, a, q);
        flx[a][0] = m[a];
        for (int b2 = 0; b2 < dim; ++b2) flx[a][1 + b2] = m[a] * u[b2];
        // the balanced part of the pressure is carried by the source rearrangement
        flx[a][1 + a] += p - ratio * et.pe[id];
        flx[a][1 + dim] = (en + p) * u[a] + c8 * (phi * gdota - phidot * ga) + m[a] * phi;
      }
      // source: pressure-gradient imbalance and the perturbation force
      const double coef = rho / et.rhoe[id] - ratio;
      double src[3];
      for (int a = 0; a < dim; ++a)
        src[a] = coef * et.gradpe[id * 3 + a] - rho * ctx.g_delta.eval_volume_node(e, a, q);

      const double wj = hb.vol_w[q] * hb.jac;
      const double* bv = hb.vol_value_row(q);
      for (int i = 0; i < nm; ++i) {
        const double* gr = &hb.vol_grad[((size_t)q * nm + i) * 3];
        for (int c = 0; c < nc; ++c) {
          double acc = 0.0;
          for (int a = 0; a < dim; ++a) acc += flx[a][c] * gr[a];
          out.c(e, c, i) += wj * acc;
        }
        for (int a = 0; a < dim; ++a) out.c(e, 1 + a, i) += wj * src[a] * bv[i];
      }
    }
    // surface integrals
    for (int s = 0; s < 2 * dim; ++s) {
      const int fi = elem_faces_[e][s];
      const int a = s / 2;
      const int side = s % 2;           // 1: this element is on the low side of its high face
      const double sgn = side ? 1.0 : -1.0;  // outward normal component along +axis
      const double fj = hb.face_jac[a];
      for (int mu = 0; mu < hb.nq_face; ++mu) {
        const size_t id = (size_t)fi * hb.nq_face + mu;
        const double w = fj * hb.face_w[mu];
        const double* bv = hb.face_value_row(a, side, mu);
        const double fg = ctx.fg_face[id];
        const double pe_avg = ctx.pe_avg[id];
        const double ratio = ctx.ratio[e];
        for (int i = 0; i < nm; ++i) {
          for (int c = 0; c < nc; ++c) {
            const double fv = ctx.flux[id * nc + c] + (c == nc - 1 ? fg : 0.0);
            out.c(e, c, i) -= sgn * w * fv * bv[i];
          }
          out.c(e, 1 + a, i) += ratio * sgn * w * pe_avg * bv[i];
        }
      }
    }
  });
  return out;
}

void SpScheme::post_stage(DGField& W, const StageContext& ctx, double dt) const {
  if (!cfg_.oe) return;
  DGField grav = gravity_energy_projection(W, comp_rho, rho0(), ctx.phi);
  std::vector<double> beta, ub, cb;
  wave_speed_bounds(W, grav, beta, ub, cb);
  oe_damp(W, dt, beta, &w_equilibrium_);
}

void SpScheme::step(DGField& W, double& t, double dt) const {
  StageContext last;
  auto L = [&](DGField& s, double ts) {
    last = recover_stage(s, ts);
    return rhs(s, last);
  };
  auto hook = [&](DGField& s) { post_stage(s, last, dt); };
  ssp_rk_step(W, t, dt, cfg_.rk_order, L, hook);
  t += dt;
}

double SpScheme::step_adaptive(DGField& W, double& t, double t_end) const {
  StageContext last = recover_stage(W, t);
  const double dt = std::min(compute_dt(last), t_end - t);
  bool first = true;
  auto L = [&](DGField& s, double ts) {
    if (!first) last = recover_stage(s, ts);
    first = false;
    return rhs(s, last);
  };
  auto hook = [&](DGField& s) { post_stage(s, last, dt); };
  ssp_rk_step(W, t, dt, cfg_.rk_order, L, hook);
  t += dt;
  return dt;
}

// ---------------------------------------------------------------------------
// baseline scheme

StdScheme::StdScheme(const CartesianMesh& mesh, const BasisSet& hydro, const PoissonSystem& sys,
                     const EquilibriumField& eq, const SchemeConfig& cfg, BoundaryClosure closure)
    : mesh_(&mesh), basis_(&hydro), sys_(&sys), eq_(&eq), cfg_(cfg), closure_(std::move(closure)) {
  elem_faces_ = build_elem_faces(mesh);
}

DGField StdScheme::initialize(const PointSampler& cons0) const {
  return l2_project(*mesh_, *basis_, mesh_->dim + 2, cons0, FieldRole::Conserved);
}

DGField StdScheme::rhs(DGField& U, double t, StageContext* ctx_out) const {
  if (cfg_.pp) pp_limit(U, nullptr, cfg_.gas, PPParams{cfg_.pp_floor});
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& hb = *basis_;
  const int dim = mesh.dim;
  const int nc = dim + 2;
  const int nm = hb.n_modes;
  StageContext ctx;
  ctx.time = t;

  const double rho0 = cfg_.gmode == GravitySource::BackgroundSubtracted ? eq_->rho0_subtracted : 0.0;
  const BasisSet& sb = sys_->solver_basis();
  DGField source(mesh, sb, 1);
  const double fourpig = 4.0 * M_PI * cfg_.gas.G;
  for (int e = 0; e < mesh.n_elements; ++e) {
    double* cm = source.modes(e, 0);
    for (int q = 0; q < sb.nq_vol; ++q) {
      const double s = fourpig * (U.eval_volume_node(e, comp_rho, q) - rho0);
      const double wj = sb.vol_w[q] * sb.jac * s;
      const double* bv = sb.vol_value_row(q);
      for (int m = 0; m < sb.n_modes; ++m) cm[m] += wj * bv[m];
    }
  }
  const SpatialFn data = sys_->bc() == PoissonBC::DirichletLike
                             ? SpatialFn([this, t](const std::array<double, 3>& x) {
                                 double v = eq_->phi_sampler(x);
                                 if (closure_.phi_delta_data) v += closure_.phi_delta_data(x, t);
                                 return v;
                               })
                             : SpatialFn();
  PoissonSolution pot = sys_->solve_d1(source, data);
  ctx.phi = std::move(pot.phi);
  ctx.g = std::move(pot.g);
  ctx.energy = U;
  ctx.grav_product = gravity_energy_projection(U, comp_rho, rho0, ctx.phi);

  ctx.vol_p.assign((size_t)mesh.n_elements * hb.nq_vol, 0.0);
  std::vector<long> bad(mesh.n_elements, 0);
  ctx.ubar.assign((size_t)mesh.n_elements * 3, 0.0);
  ctx.cbar.assign(mesh.n_elements, 0.0);
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double rho = U.cell_average(e, comp_rho);
    double ke = 0.0;
    for (int a = 0; a < dim; ++a) {
      ctx.ubar[(size_t)e * 3 + a] = U.cell_average(e, 1 + a) / rho;
      ke += ctx.ubar[(size_t)e * 3 + a] * ctx.ubar[(size_t)e * 3 + a];
    }
    const double p = (cfg_.gas.gamma - 1.0) * (U.cell_average(e, comp_energy(dim)) - 0.5 * rho * ke);
    ctx.cbar[e] = std::sqrt(cfg_.gas.gamma * std::max(p, 1e-300) / rho);
  }
  parallel_for(mesh.n_elements, cfg_.threads, [&](int e) {
    for (int q = 0; q < hb.nq_vol; ++q) {
      EulerState s;
      s.rho = U.eval_volume_node(e, comp_rho, q);
      for (int a = 0; a < dim; ++a) s.m[a] = U.eval_volume_node(e, 1 + a, q);
      s.E = U.eval_volume_node(e, comp_energy(dim), q);
      Primitive w = cons_to_prim(s, cfg_.gas, dim);
      if (!w.valid) {
        ++bad[e];
        w.p = std::max(w.p, cfg_.pp_floor);
      }
      ctx.vol_p[(size_t)e * hb.nq_vol + q] = w.p;
    }
  });
  long nbad = 0;
  for (long v : bad) nbad += v;
  if (nbad > 0 && !cfg_.pp) throw NumericalError("invalid state in the baseline scheme");
  ctx.invalid_states += nbad;
  invalid_total_ += nbad;

  const int nfq = hb.nq_face;
  const size_t nfn = mesh.faces.size() * nfq;
  ctx.flux.assign(nfn * nc, 0.0);
  parallel_for((int)mesh.faces.size(), cfg_.threads, [&](int fi) {
    const Face& f = mesh.faces[fi];
    const int a = f.axis;
    std::array<double, 3> n{0, 0, 0};
    n[a] = 1.0;
    double buf[5];
    for (int mu = 0; mu < nfq; ++mu) {
      const size_t id = (size_t)fi * nfq + mu;
      EulerState ul, ur;
      if (!f.boundary) {
        ul = face_trace(U, U, f.left, a, 1, mu, dim);
        ur = face_trace(U, U, f.right, a, 0, mu, dim);
      } else {
        const bool left_in = f.right < 0;
        const int e = left_in ? f.left : f.right;
        const int side = left_in ? 1 : 0;
        EulerState in = face_trace(U, U, e, a, side, mu, dim);
        EulerState gh = in;
        if (f.tag == BoundaryTag::Reflecting) {
          gh.m[a] = -gh.m[a];
        } else if (f.tag == BoundaryTag::Exact) {
          const auto x = mesh.to_physical(e, hb.face_ref[(size_t)hb.slot(a, side) * nfq + mu]);
          double cons[5];
          if (closure_.exact_state) {
            closure_.exact_state(x, t, cons);
          } else {
            cons[0] = eq_->rho_sampler(x);
            for (int d = 0; d < dim; ++d) cons[1 + d] = 0.0;
            cons[1 + dim] = eq_->p_sampler(x) / (cfg_.gas.gamma - 1.0);
          }
          gh.rho = cons[0];
          for (int d = 0; d < dim; ++d) gh.m[d] = cons[1 + d];
          gh.E = cons[1 + dim];
        }
        ul = left_in ? in : gh;
        ur = left_in ? gh : in;
      }
      hllc_flux(ul, ur, n, cfg_.gas, dim, buf);
      for (int c = 0; c < nc; ++c) ctx.flux[id * nc + c] = buf[c];
    }
  });

  DGField out(mesh, hb, nc, FieldRole::Conserved);
  parallel_for(mesh.n_elements, cfg_.threads, [&](int e) {
    double flx[3][5];
    for (int q = 0; q < hb.nq_vol; ++q) {
      const size_t id = (size_t)e * hb.nq_vol + q;
      const double rho = U.eval_volume_node(e, comp_rho, q);
      double m[3] = {0, 0, 0}, u[3] = {0, 0, 0}, g[3] = {0, 0, 0};
      for (int a = 0; a < dim; ++a) {
        m[a] = U.eval_volume_node(e, 1 + a, q);
        u[a] = m[a] / rho;
        g[a] = ctx.g.eval_volume_node(e, a, q);
      }
      const double en = U.eval_volume_node(e, comp_energy(dim), q);
      const double p = ctx.vol_p[id];
      for (int a = 0; a < dim; ++a) {
        flx[a][0] = m[a];
        for (int b2 = 0; b2 < dim; ++b2) flx[a][1 + b2] = m[a] * u[b2];
        flx[a][1 + a] += p;
        flx[a][1 + dim] = (en + p) * u[a];
      }
      double mg = 0.0;
      for (int a = 0; a < dim; ++a) mg += m[a] * g[a];
      const double wj = hb.vol_w[q] * hb.jac;
      const double* bv = hb.vol_value_row(q);
      for (int i = 0; i < nm; ++i) {
        const double* gr = &hb.vol_grad[((size_t)q * nm + i) * 3];
        for (int c = 0; c < nc; ++c) {
          double acc = 0.0;
          for (int a = 0; a < dim; ++a) acc += flx[a][c] * gr[a];
          out.c(e, c, i) += wj * acc;
        }
        for (int a = 0; a < dim; ++a) out.c(e, 1 + a, i) -= wj * rho * g[a] * bv[i];
        out.c(e, comp_energy(dim), i) -= wj * mg * bv[i];
      }
    }
    for (int s = 0; s < 2 * dim; ++s) {
      const int fi = elem_faces_[e][s];
      const int a = s / 2;
      const int side = s % 2;
      const double sgn = side ? 1.0 : -1.0;
      const double fj = hb.face_jac[a];
      for (int mu = 0; mu < hb.nq_face; ++mu) {
        const size_t id = (size_t)fi * hb.nq_face + mu;
        const double w = fj * hb.face_w[mu];
        const double* bv = hb.face_value_row(a, side, mu);
        for (int i = 0; i < nm; ++i)
          for (int c = 0; c < nc; ++c)
            out.c(e, c, i) -= sgn * w * ctx.flux[id * nc + c] * bv[i];
      }
    }
  });
  if (ctx_out) *ctx_out = std::move(ctx);
  return out;
}

double StdScheme::compute_dt(const StageContext& ctx) const {
  double speed = 0.0;
  for (int e = 0; e < mesh_->n_elements; ++e) {
    double umax = 0.0;
    for (int a = 0; a < mesh_->dim; ++a) umax = std::max(umax, std::abs(ctx.ubar[(size_t)e * 3 + a]));
    speed = std::max(speed, umax + ctx.cbar[e]);
  }
  const int k = basis_->degree;
  const double ex = k <= 2 ? 1.0 : (k + 1.0) / 3.0;
  return cfg_.cfl * std::pow(mesh_->diameter(), ex) / speed;
}

void StdScheme::post_stage(DGField& U, const StageContext& ctx, double dt) const {
  (void)ctx;
  if (cfg_.oe) {
    std::vector<double> beta((size_t)mesh_->n_elements * 3, 0.0);
    for (int e = 0; e < mesh_->n_elements; ++e) {
      const double rho = U.cell_average(e, comp_rho);
      double ke = 0.0, ub[3] = {0, 0, 0};
      for (int a = 0; a < mesh_->dim; ++a) {
        ub[a] = U.cell_average(e, 1 + a) / rho;
        ke += ub[a] * ub[a];
      }
      const double p = (cfg_.gas.gamma - 1.0) *
                       (U.cell_average(e, comp_energy(mesh_->dim)) - 0.5 * rho * ke);
      const double c = std::sqrt(cfg_.gas.gamma * std::max(p, 1e-300) / rho);
      for (int a = 0; a < mesh_->dim; ++a) beta[(size_t)e * 3 + a] = std::abs(ub[a]) + c;
    }
    oe_damp(U, dt, beta, nullptr);
  }
}

void StdScheme::step(DGField& U, double& t, double dt) const {
  StageContext last;
  auto L = [&](DGField& s, double ts) { return rhs(s, ts, &last); };
  auto hook = [&](DGField& s) { post_stage(s, last, dt); };
  ssp_rk_step(U, t, dt, cfg_.rk_order, L, hook);
  t += dt;
}

double StdScheme::cfl_step(const DGField& U) const {
  const int dim = mesh_->dim;
  double speed = 0.0;
  for (int e = 0; e < mesh_->n_elements; ++e) {
    const double rho = U.cell_average(e, comp_rho);
    if (!(rho > 0.0)) throw NumericalError("nonpositive cell-average density");
    double umax = 0.0, ke = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double u = U.cell_average(e, 1 + a) / rho;
      umax = std::max(umax, std::abs(u));
      ke += u * u;
    }
    const double p = (cfg_.gas.gamma - 1.0) * (U.cell_average(e, comp_energy(dim)) - 0.5 * rho * ke);
    if (!(p > 0.0)) throw NumericalError("nonpositive cell-average pressure");
    speed = std::max(speed, umax + std::sqrt(cfg_.gas.gamma * p / rho));
  }
  const int k = basis_->degree;
  const double ex = k <= 2 ? 1.0 : (k + 1.0) / 3.0;
  return cfg_.cfl * std::pow(mesh_->diameter(), ex) / speed;
}

double StdScheme::step_adaptive(DGField& U, double& t, double t_end) const {
  const double dt = std::min(cfl_step(U), t_end - t);
  step(U, t, dt);
  return dt;
}

double StdScheme::diagnostic_total_energy(const DGField& U) const {
  const int dim = mesh_->dim;
  const double rho0 = cfg_.gmode == GravitySource::BackgroundSubtracted ? eq_->rho0_subtracted : 0.0;
  const BasisSet& sb = sys_->solver_basis();
  DGField source(*mesh_, sb, 1);
  const double fourpig = 4.0 * M_PI * cfg_.gas.G;
  for (int e = 0; e < mesh_->n_elements; ++e) {
    double* cm = source.modes(e, 0);
    for (int q = 0; q < sb.nq_vol; ++q) {
      const double s = fourpig * (U.eval_volume_node(e, comp_rho, q) - rho0);
      const double wj = sb.vol_w[q] * sb.jac * s;
      const double* bv = sb.vol_value_row(q);
      for (int m = 0; m < sb.n_modes; ++m) cm[m] += wj * bv[m];
    }
  }
  const SpatialFn data = sys_->bc() == PoissonBC::DirichletLike
                             ? SpatialFn([this](const std::array<double, 3>& x) {
                                 return eq_->phi_sampler(x);
                               })
                             : SpatialFn();
  PoissonSolution pot = sys_->solve_d1(source, data);
  DGField grav = gravity_energy_projection(U, comp_rho, rho0, pot.phi);
  double tot = 0.0;
  for (int e = 0; e < mesh_->n_elements; ++e)
    tot += (U.c(e, comp_energy(dim), 0) + grav.c(e, 0, 0)) * basis_->sqrt_cellvol;
  return tot;
}

}  // namespace sgdg
