#include "sgdg/scenarios.hpp"

#include <chrono>
#include <cmath>

#include "sgdg/errors.hpp"

namespace sgdg {

namespace {

using Vec3 = std::array<double, 3>;

// per-scenario wiring; closures receive the equilibrium so initial data can
// be phrased as bumps on top of it
struct Setup {
  int dim = 2;
  Vec3 lo{0, 0, 0}, hi{1, 1, 1};
  BoundaryTag tag = BoundaryTag::Exact;
  GravitySource gmode = GravitySource::Full;
  bool uniform = false;
  double p0 = 0.0;
  PolytropeSpec poly;
  std::function<void(const EquilibriumField&, const Vec3&, double*)> ic;
  std::function<void(const EquilibriumField&, const GasModel&, BoundaryClosure&)> wire_closure;
  // analytic reference at time t (accuracy scenarios)
  std::function<void(const EquilibriumField&, double, const Vec3&, double*)> reference;
  bool reference_is_equilibrium = false;
  Vec3 center{0, 0, 0};
  bool radial = false;
};

Setup make_setup(const ScenarioConfig& cfg) {
  Setup s;
  const std::string& id = cfg.scenario;
  const double gamma = cfg.gamma;

  if (id == "accuracy2d" || id == "accuracy3d") {
    const int dim = id == "accuracy2d" ? 2 : 3;
    s.dim = dim;
    s.poly = PolytropeSpec{cfg.kappa, cfg.lambda, cfg.n, cfg.G};
    s.poly.symmetry = PolytropeSymmetry::Planar;
    const double a = s.poly.scale_length();
    const double sq = std::sqrt((double)dim);
    // the diagonal coordinate spans [pi/4, 3pi/4] (2D) or [pi/6, 5pi/6] (3D),
    // where the background profile stays positive
    const double lo = dim == 2 ? sq * M_PI * a / 8.0 : sq * M_PI * a / 18.0;
    const double hi = dim == 2 ? 3.0 * sq * M_PI * a / 8.0 : 5.0 * sq * M_PI * a / 18.0;
    for (int d = 0; d < dim; ++d) {
      s.lo[d] = lo;
      s.hi[d] = hi;
    }
    s.tag = BoundaryTag::Exact;
    const Vec3 u0 = dim == 2 ? Vec3{1.0, 1.0, 0.0} : Vec3{0.2, 0.3, 0.5};
    const double kappa = cfg.kappa, G = cfg.G;
    double usum = 0.0;
    for (int d = 0; d < dim; ++d) usum += u0[d];
    auto wave = [a, dim, sq, usum](const Vec3& x, double t) {
      double arg = 0.0;
      for (int d = 0; d < dim; ++d) arg += x[d];
      return std::sin(sq / (dim * a) * (arg - usum * t));
    };
    auto dwave_dt = [a, dim, sq, usum](const Vec3& x, double t) {
      double arg = 0.0;
      for (int d = 0; d < dim; ++d) arg += x[d];
      return -usum * sq / (dim * a) * std::cos(sq / (dim * a) * (arg - usum * t));
    };
    const double phi_c = -4.0 * M_PI * G * a * a;  // phi = phi_c * rho
    auto state = [wave, u0, kappa, gamma, dim](const Vec3& x, double t, double* v) {
      const double r = wave(x, t);
      double ke = 0.0;
      v[0] = r;
      for (int d = 0; d < dim; ++d) {
        v[1 + d] = r * u0[d];
        ke += u0[d] * u0[d];
      }
      v[1 + dim] = kappa * r * r / (gamma - 1.0) + 0.5 * r * ke;
    };
    s.ic = [state](const EquilibriumField&, const Vec3& x, double* v) { state(x, 0.0, v); };
    s.wire_closure = [state, wave, dwave_dt, phi_c](const EquilibriumField& eq, const GasModel&,
                                                    BoundaryClosure& cl) {
      cl.exact_state = [state](const Vec3& x, double t, double* v) { state(x, t, v); };
      cl.phi_delta_data = [&eq, wave, phi_c](const Vec3& x, double t) {
        return phi_c * wave(x, t) - eq.phi_sampler(x);
      };
      cl.phi_dot_data = [dwave_dt, phi_c](const Vec3& x, double t) { return phi_c * dwave_dt(x, t); };
    };
    // the reference total energy carries the gravitational part
    s.reference = [state, wave, phi_c, dim](const EquilibriumField&, double t, const Vec3& x,
                                            double* v) {
      state(x, t, v);
      const double r = wave(x, t);
      v[1 + dim] += 0.5 * r * (phi_c * r);
    };
    return s;
  }

  if (id == "wb2d" || id == "wb3d" || id == "perturb2d_sym" || id == "perturb2d_asym" ||
      id == "blast2d" || id == "multiblast2d" || id == "perturb3d" || id == "explosion3d") {
    const int dim = (id == "wb3d" || id == "perturb3d" || id == "explosion3d") ? 3 : 2;
    s.dim = dim;
    for (int d = 0; d < dim; ++d) {
      s.lo[d] = -0.5;
      s.hi[d] = 0.5;
    }
    s.poly = PolytropeSpec{cfg.kappa, cfg.lambda, cfg.n, cfg.G};
    s.radial = dim == 2;
    const double mu = cfg.mu;
    if (id == "wb2d" || id == "wb3d") {
      s.tag = BoundaryTag::Exact;
      s.ic = [gamma, dim](const EquilibriumField& eq, const Vec3& x, double* v) {
        v[0] = eq.rho_sampler(x);
        for (int d = 0; d < dim; ++d) v[1 + d] = 0.0;
        v[1 + dim] = eq.p_sampler(x) / (gamma - 1.0);
      };
      s.reference_is_equilibrium = true;
    } else if (id == "perturb2d_sym" || id == "perturb2d_asym" || id == "perturb3d") {
      s.tag = BoundaryTag::Transmissive;
      const Vec3 c = id == "perturb2d_asym" ? Vec3{0.3, 0.3, 0.0} : Vec3{0.0, 0.0, 0.0};
      s.radial = id == "perturb2d_sym";
      s.ic = [gamma, mu, c, dim](const EquilibriumField& eq, const Vec3& x, double* v) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
        const double p = eq.p_sampler(x) + mu * std::exp(-100.0 * r2);
        v[0] = eq.rho_sampler(x);
        for (int d = 0; d < dim; ++d) v[1 + d] = 0.0;
        v[1 + dim] = p / (gamma - 1.0);
      };
    } else if (id == "blast2d") {
      s.tag = BoundaryTag::Transmissive;
      s.ic = [gamma, mu, dim](const EquilibriumField& eq, const Vec3& x, double* v) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        const double p = eq.p_sampler(x) + (r < 0.1 ? mu : 0.0);
        v[0] = eq.rho_sampler(x);
        for (int d = 0; d < dim; ++d) v[1 + d] = 0.0;
        v[1 + dim] = p / (gamma - 1.0);
      };
    } else if (id == "multiblast2d") {
      s.tag = BoundaryTag::Transmissive;
      s.radial = false;
      static const Vec3 spots[5] = {{-0.25, 0.3, 0}, {-0.25, 0.1, 0}, {0.025, 0.3, 0},
                                    {0.025, 0.225, 0}, {0.1, -0.1, 0}};
      s.ic = [gamma, mu, dim](const EquilibriumField& eq, const Vec3& x, double* v) {
        double bump = 0.0;
        for (const auto& c : spots) {
          const double r2 = (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]);
          if (r2 < 0.05 * 0.05) bump += mu;
        }
        v[0] = eq.rho_sampler(x);
        for (int d = 0; d < dim; ++d) v[1 + d] = 0.0;
        v[1 + dim] = (eq.p_sampler(x) + bump) / (gamma - 1.0);
      };
    } else {  // explosion3d: pressure amplified by mu inside r < 0.1
      s.tag = BoundaryTag::Transmissive;
      s.ic = [gamma, mu, dim](const EquilibriumField& eq, const Vec3& x, double* v) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        const double p = (r < 0.1 ? mu : 1.0) * eq.p_sampler(x);
        v[0] = eq.rho_sampler(x);
        for (int d = 0; d < dim; ++d) v[1 + d] = 0.0;
        v[1 + dim] = p / (gamma - 1.0);
      };
    }
    return s;
  }

  if (id == "jeans") {
    s.dim = 2;
    s.lo = {0, 0, 0};
    s.hi = {1, 1, 1};
    s.tag = BoundaryTag::Periodic;
    s.gmode = GravitySource::BackgroundSubtracted;
    s.uniform = true;
    s.p0 = cfg.rho0 / gamma;
    const double rho0 = cfg.rho0, p0 = s.p0, d0 = cfg.mu;
    s.ic = [rho0, p0, d0, gamma](const EquilibriumField&, const Vec3& x, double* v) {
      const double pert = d0 * std::sin(2.0 * M_PI * (x[0] + x[1]));
      v[0] = rho0 * (1.0 + pert);
      v[1] = v[2] = 0.0;
      v[3] = p0 * (1.0 + pert) / (gamma - 1.0);
    };
    return s;
  }
  throw ConfigError("unknown scenario id '" + id + "'");
}

void manufactured_poisson_run(const ScenarioConfig& cfg, RunOutputs& out) {
  auto exact = [](const Vec3& x) { return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]); };
  auto source = [&](const Vec3& x) { return -2.0 * M_PI * M_PI * exact(x); };
  std::vector<ErrorTableRow> rows;
  ErrorTableRow prev;
  for (size_t mi = 0; mi < cfg.meshes.size(); ++mi) {
    const int nmesh = cfg.meshes[mi];
    auto mesh = std::make_shared<CartesianMesh>(
        build_mesh(2, {0, 0, 0}, {1, 1, 1}, {nmesh, nmesh, 1}, BoundaryTag::Transmissive));
    auto basis = std::make_shared<BasisSet>(BasisSet::create(2, cfg.degree, cfg.trunc, mesh->h));
    auto sys = std::make_shared<PoissonSystem>(
        PoissonSystem::assemble(*mesh, *basis, PenaltyParams{}, PoissonBC::DirichletLike));
    DGField src = l2_project(*mesh, *basis, 1,
                             [&](const Vec3& x, double* v) { v[0] = source(x); });
    PoissonSolution sol = sys->solve_d1(src, [](const Vec3&) { return 0.0; });
    ErrorReport rep = error_norms(sol.phi, [&](const Vec3& x, double* v) { v[0] = exact(x); },
                                  {"phi"});
    ErrorTableRow row;
    row.variable = "phi";
    row.mesh = nmesh;
    row.l1 = rep.l1[0];
    row.l2 = rep.l2[0];
    row.linf = rep.linf[0];
    if (mi > 0) {
      row.has_order = true;
      row.l1_order = convergence_order(prev.l1, row.l1);
      row.l2_order = convergence_order(prev.l2, row.l2);
      row.linf_order = convergence_order(prev.linf, row.linf);
    }
    rows.push_back(row);
    prev = row;
    if (mi + 1 == cfg.meshes.size()) {
      out.art.mesh = mesh;
      out.art.basis = basis;
      out.art.solver_basis = basis;
      out.art.sys = sys;
      out.phi = sol.phi;
    }
  }
  out.errors = rows;
}

std::vector<std::string> variable_names(int dim, bool sp) {
  std::vector<std::string> v{"rho", "mom_x", "mom_y"};
  if (dim == 3) v.push_back("mom_z");
  v.push_back(sp ? "E_tot" : "E");
  return v;
}

}  // namespace

RunOutputs run_scenario(const ScenarioConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  RunOutputs out;
  out.config = cfg;
  if (cfg.scenario == "manufactured_poisson") {
    manufactured_poisson_run(cfg, out);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
  }

  Setup setup = make_setup(cfg);
  const int dim = setup.dim;
  const int nc = dim + 2;
  const bool sp = cfg.scheme == SchemeKind::StructurePreserving;
  out.structure_preserving = sp;

  // error rows grouped per variable across the mesh sweep
  const auto names = variable_names(dim, sp);
  std::vector<std::vector<ErrorTableRow>> sweep_rows(names.size());

  for (size_t mi = 0; mi < cfg.meshes.size(); ++mi) {
    const int nmesh = cfg.meshes[mi];
    std::array<int, 3> cells{nmesh, nmesh, dim == 3 ? nmesh : 1};
    auto mesh = std::make_shared<CartesianMesh>(build_mesh(dim, setup.lo, setup.hi, cells, setup.tag));
    auto basis = std::make_shared<BasisSet>(BasisSet::create(dim, cfg.degree, cfg.trunc, mesh->h));
    const bool periodic = setup.tag == BoundaryTag::Periodic;
    std::shared_ptr<BasisSet> solver_basis = basis;
    const bool tensor = dim == 3 && !periodic;
    if (tensor && cfg.trunc != BasisTrunc::Tensor)
      solver_basis = std::make_shared<BasisSet>(BasisSet::create(dim, cfg.degree, BasisTrunc::Tensor, mesh->h));
    auto sys = std::make_shared<PoissonSystem>(PoissonSystem::assemble(
        *mesh, *solver_basis, PenaltyParams{}, periodic ? PoissonBC::Periodic : PoissonBC::DirichletLike,
        tensor));
    sys->set_threads(cfg.threads);
    GasModel gas{cfg.gamma, cfg.G};
    auto eq = std::make_shared<EquilibriumField>(
        setup.uniform ? build_uniform_equilibrium(cfg.rho0, setup.p0, *mesh, *basis, *sys, gas)
                      : build_equilibrium(setup.poly, *mesh, *basis, *sys, gas,
                                          setup.gmode == GravitySource::BackgroundSubtracted
                                              ? cfg.rho0
                                              : 0.0));
    SchemeConfig scfg;
    scfg.gas = gas;
    scfg.pen = PenaltyParams{};
    scfg.cfl = cfg.cfl > 0.0 ? cfg.cfl : default_cfl(cfg.degree, dim);
    scfg.rk_order = cfg.rk_order;
    scfg.oe = cfg.oe;
    scfg.pp = cfg.pp;
    scfg.d2 = cfg.d2;
    scfg.gmode = setup.gmode;
    scfg.pp_floor = cfg.pp_floor;
    scfg.threads = cfg.threads;
    BoundaryClosure cl;
    if (setup.wire_closure) setup.wire_closure(*eq, gas, cl);

    PointSampler ic = [&](const Vec3& x, double* v) { setup.ic(*eq, x, v); };

    DGField state;
    DGField phi_final;
    EnergyHistory history;
    double drift = 0.0, e0 = 0.0;
    long steps = 0;

    auto sample_rho_dev = [&](const DGField& w) {
      double acc = 0.0;
      for (int e = 0; e < mesh->n_elements; ++e)
        for (int q = 0; q < basis->nq_vol; ++q) {
          const double d = w.eval_volume_node(e, 0, q) - eq->rho_h.eval_volume_node(e, 0, q);
          acc += basis->vol_w[q] * basis->jac * d * d;
        }
      return std::sqrt(acc);
    };

    if (sp) {
      SpScheme scheme(*mesh, *basis, *sys, *eq, scfg, cl);
      DGField w = scheme.initialize(ic);
      double t = 0.0;
      e0 = total_energy(w);
      {
        StageContext c0 = scheme.recover_stage(w, 0.0);
        EnergySample es = energy_breakdown(w, c0, 0.0);
        es.rho_dev_l2 = sample_rho_dev(w);
        history.samples.push_back(es);
      }
      while (t < cfg.t_end - 1e-14) {
        scheme.step_adaptive(w, t, cfg.t_end);
        ++steps;
        drift = std::max(drift, std::abs(total_energy(w) - e0));
        if (steps % cfg.out_every == 0 || t >= cfg.t_end - 1e-14) {
          StageContext c = scheme.recover_stage(w, t);
          EnergySample es = energy_breakdown(w, c, t);
          es.rho_dev_l2 = sample_rho_dev(w);
          history.samples.push_back(es);
        }
      }
      StageContext cf = scheme.recover_stage(w, t);
      phi_final = cf.phi;
      out.invalid_states += scheme.invalid_count();
      out.limited_cells += scheme.limited_count();
      out.cell_pressure.assign(mesh->n_elements, 0.0);
      for (int e = 0; e < mesh->n_elements; ++e) {
        double pm = 0.0;
        for (int q = 0; q < basis->nq_vol; ++q)
          pm += basis->vol_w[q] * basis->jac * cf.vol_p[(size_t)e * basis->nq_vol + q];
        out.cell_pressure[e] = pm / mesh->volume();
      }
      state = std::move(w);
    } else {
      StdScheme scheme(*mesh, *basis, *sys, *eq, scfg, cl);
      DGField u = scheme.initialize(ic);
      double t = 0.0;
      e0 = scheme.diagnostic_total_energy(u);
      {
        StageContext c0;
        scheme.rhs(u, 0.0, &c0);
        EnergySample es = energy_breakdown(u, c0, 0.0);
        es.total = e0;
        es.rho_dev_l2 = sample_rho_dev(u);
        history.samples.push_back(es);
      }
      while (t < cfg.t_end - 1e-14) {
        scheme.step_adaptive(u, t, cfg.t_end);
        ++steps;
        const double et = scheme.diagnostic_total_energy(u);
        drift = std::max(drift, std::abs(et - e0));
        if (steps % cfg.out_every == 0 || t >= cfg.t_end - 1e-14) {
          StageContext c;
          scheme.rhs(u, t, &c);
          EnergySample es = energy_breakdown(u, c, t);
          es.total = et;
          es.rho_dev_l2 = sample_rho_dev(u);
          history.samples.push_back(es);
        }
      }
      StageContext cf;
      scheme.rhs(u, t, &cf);
      phi_final = cf.phi;
      out.invalid_states += scheme.invalid_count();
      out.cell_pressure.assign(mesh->n_elements, 0.0);
      for (int e = 0; e < mesh->n_elements; ++e) {
        double pm = 0.0;
        for (int q = 0; q < basis->nq_vol; ++q)
          pm += basis->vol_w[q] * basis->jac * cf.vol_p[(size_t)e * basis->nq_vol + q];
        out.cell_pressure[e] = pm / mesh->volume();
      }
      state = std::move(u);
    }

    // error table entry for this mesh
    if (setup.reference || setup.reference_is_equilibrium) {
      ErrorReport rep;
      if (setup.reference_is_equilibrium) {
        // measured against the preserved discrete state
        DGField wq = state;
        const DGField* ref;
        DGField eqw(*mesh, *basis, nc, FieldRole::Conserved);
        for (int e = 0; e < mesh->n_elements; ++e)
          for (int m = 0; m < basis->n_modes; ++m) {
            eqw.c(e, 0, m) = eq->rho_h.c(e, 0, m);
            eqw.c(e, nc - 1, m) = sp ? eq->etot_h.c(e, 0, m) : eq->p_h.c(e, 0, m) / (gas.gamma - 1.0);
          }
        ref = &eqw;
        rep.variable = names;
        rep.l1.assign(nc, 0.0);
        rep.l2.assign(nc, 0.0);
        rep.linf.assign(nc, 0.0);
        for (int e = 0; e < mesh->n_elements; ++e)
          for (int q = 0; q < basis->nq_vol; ++q) {
            const double wj = basis->vol_w[q] * basis->jac;
            for (int c = 0; c < nc; ++c) {
              const double d = std::abs(wq.eval_volume_node(e, c, q) - ref->eval_volume_node(e, c, q));
              rep.l1[c] += wj * d;
              rep.l2[c] += wj * d * d;
              rep.linf[c] = std::max(rep.linf[c], d);
            }
          }
        for (int c = 0; c < nc; ++c) rep.l2[c] = std::sqrt(rep.l2[c]);
      } else {
        const double tend = cfg.t_end;
        rep = error_norms(state, [&](const Vec3& x, double* v) { setup.reference(*eq, tend, x, v); },
                          names);
      }
      for (size_t c = 0; c < names.size(); ++c) {
        ErrorTableRow row;
        row.variable = names[c];
        row.mesh = nmesh;
        row.l1 = rep.l1[c];
        row.l2 = rep.l2[c];
        row.linf = rep.linf[c];
        if (!sweep_rows[c].empty()) {
          row.has_order = true;
          row.l1_order = convergence_order(sweep_rows[c].back().l1, row.l1);
          row.l2_order = convergence_order(sweep_rows[c].back().l2, row.l2);
          row.linf_order = convergence_order(sweep_rows[c].back().linf, row.linf);
        }
        sweep_rows[c].push_back(row);
      }
    }

    if (mi + 1 == cfg.meshes.size()) {
      if (setup.radial) out.radial_deviation = radial_symmetry_deviation(state, 0, setup.center);
      out.art = {mesh, basis, solver_basis, sys, eq};
      out.state = std::move(state);
      out.phi = std::move(phi_final);
      out.energy = std::move(history);
      out.energy_drift = drift;
      out.initial_energy = e0;
      out.steps = steps;
    }
  }
  for (const auto& group : sweep_rows)
    for (const auto& row : group) out.errors.push_back(row);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace sgdg
