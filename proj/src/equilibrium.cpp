#include "sgdg/equilibrium.hpp"

#include <cmath>

#include "sgdg/errors.hpp"

namespace sgdg {

double lane_emden_theta_3d(int n, double r) {
  switch (n) {
    case 0:
      return 1.0 - r * r / 6.0;
    case 1:
      if (r < 1e-4) {
        const double r2 = r * r;
        return 1.0 - r2 / 6.0 + r2 * r2 / 120.0;
      }
      return std::sin(r) / r;
    case 5:
      return 1.0 / std::sqrt(1.0 + r * r / 3.0);
    default:
      throw ConfigError("no closed-form Lane-Emden profile for n = " + std::to_string(n));
  }
}

double lane_emden_theta_3d_deriv(int n, double r) {
  switch (n) {
    case 0:
      return -r / 3.0;
    case 1:
      if (r < 1e-4) return -r / 3.0 + r * r * r / 30.0;
      return std::cos(r) / r - std::sin(r) / (r * r);
    case 5: {
      const double s = 1.0 + r * r / 3.0;
      return -r / (3.0 * s * std::sqrt(s));
    }
    default:
      throw ConfigError("no closed-form Lane-Emden profile for n = " + std::to_string(n));
  }
}

namespace {
// 64-point Gauss-Legendre on [0, pi], built once
struct BesselRule {
  std::vector<double> x, w;
  BesselRule() {
    gauss_legendre(64, x, w);
    for (size_t i = 0; i < x.size(); ++i) {
      x[i] = 0.5 * M_PI * (x[i] + 1.0);
      w[i] *= 0.5 * M_PI;
    }
  }
};
const BesselRule& bessel_rule() {
  static BesselRule r;
  return r;
}
}  // namespace

double lane_emden_theta_2d(double r) {
  const auto& q = bessel_rule();
  double s = 0.0;
  for (size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * std::cos(r * std::sin(q.x[i]));
  return s / M_PI;
}

double lane_emden_theta_2d_deriv(double r) {
  const auto& q = bessel_rule();
  double s = 0.0;
  for (size_t i = 0; i < q.x.size(); ++i)
    s -= q.w[i] * std::sin(r * std::sin(q.x[i])) * std::sin(q.x[i]);
  return s / M_PI;
}

double PolytropeSpec::scale_length() const {
  return std::sqrt(kappa * (n + 1.0) * std::pow(lambda, (1.0 - n) / (double)n) / (4.0 * M_PI * G));
}

namespace {

void build_face_tables(EquilibriumField& eq, const GasModel& gas) {
  const CartesianMesh& mesh = *eq.mesh;
  const BasisSet& b = *eq.basis;
  const size_t nfn = mesh.faces.size() * b.nq_face;
  for (int s = 0; s < 2; ++s) {
    eq.pe_face[s].assign(nfn, 0.0);
    eq.rhoe_face[s].assign(nfn, 0.0);
    eq.ee_face[s].assign(nfn, 0.0);
  }
  for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    const int a = f.axis;
    for (int mu = 0; mu < b.nq_face; ++mu) {
      const size_t id = fi * b.nq_face + mu;
      double pl, pr, rl, rr;
      if (!f.boundary) {
        pl = eq.p_h.eval_face_node(f.left, 0, a, 1, mu);
        rl = eq.rho_h.eval_face_node(f.left, 0, a, 1, mu);
        pr = eq.p_h.eval_face_node(f.right, 0, a, 0, mu);
        rr = eq.rho_h.eval_face_node(f.right, 0, a, 0, mu);
      } else {
        const bool left_in = f.right < 0;
        const int e = left_in ? f.left : f.right;
        const int side = left_in ? 1 : 0;
        const double pin = eq.p_h.eval_face_node(e, 0, a, side, mu);
        const double rin = eq.rho_h.eval_face_node(e, 0, a, side, mu);
        double pout = pin, rout = rin;
        if (f.tag == BoundaryTag::Exact) {
          const auto x = mesh.to_physical(e, b.face_ref[(size_t)b.slot(a, side) * b.nq_face + mu]);
          pout = eq.p_sampler(x);
          rout = eq.rho_sampler(x);
        }
        pl = left_in ? pin : pout;
        rl = left_in ? rin : rout;
        pr = left_in ? pout : pin;
        rr = left_in ? rout : rin;
      }
      eq.pe_face[0][id] = pl;
      eq.pe_face[1][id] = pr;
      eq.rhoe_face[0][id] = rl;
      eq.rhoe_face[1][id] = rr;
      eq.ee_face[0][id] = pl / (gas.gamma - 1.0);
      eq.ee_face[1][id] = pr / (gas.gamma - 1.0);
    }
  }
}

void finish_equilibrium(EquilibriumField& eq, const PoissonSystem& sys, const GasModel& gas,
                        double rho0, bool trivial_potential) {
  const CartesianMesh& mesh = *eq.mesh;
  const BasisSet& sb = sys.solver_basis();
  const SpatialFn data = sys.bc() == PoissonBC::DirichletLike
                             ? SpatialFn([&eq](const std::array<double, 3>& x) { return eq.phi_sampler(x); })
                             : SpatialFn();
  if (trivial_potential) {
    // uniform background with subtracted source: phi and g vanish identically
    eq.potential.phi = DGField(mesh, sb, 1, FieldRole::Potential);
    eq.potential.g = DGField(mesh, sb, mesh.dim, FieldRole::Gradient);
  } else {
    // Poisson source 4 pi G (rho_h - rho0) on the solver basis (pointwise
    // values of the projected density, so enriched solver spaces see the
    // same data)
    DGField source(mesh, sb, 1);
    const double fourpig = 4.0 * M_PI * gas.G;
    for (int e = 0; e < mesh.n_elements; ++e)
      for (int q = 0; q < sb.nq_vol; ++q) {
        const double s = fourpig * (eq.rho_h.eval_volume_node(e, 0, q) - rho0);
        const double wj = sb.vol_w[q] * sb.jac * s;
        const double* bv = sb.vol_value_row(q);
        for (int m = 0; m < sb.n_modes; ++m) source.c(e, 0, m) += wj * bv[m];
      }
    eq.potential = sys.solve_d1(source, data);
  }
  eq.rho0_subtracted = rho0;

  // total-energy coefficients at equilibrium
  DGField grav = gravity_energy_projection(eq.rho_h, 0, rho0, eq.potential.phi);
  eq.etot_h = eq.p_h;
  for (size_t i = 0; i < eq.etot_h.coeff.size(); ++i)
    eq.etot_h.coeff[i] = eq.p_h.coeff[i] / (gas.gamma - 1.0) + grav.coeff[i];

  eq.rho_avg.resize(mesh.n_elements);
  for (int e = 0; e < mesh.n_elements; ++e) {
    eq.rho_avg[e] = eq.rho_h.cell_average(e, 0);
    if (!(eq.rho_avg[e] > 0.0))
      throw NumericalError("equilibrium cell-average density nonpositive in element " +
                           std::to_string(e));
  }
  build_face_tables(eq, gas);
  eq.traces = ldg_traces(eq.potential.phi, eq.potential.g, PenaltyParams{}, data);
}

}  // namespace

EquilibriumField build_equilibrium(const PolytropeSpec& spec, const CartesianMesh& mesh,
                                   const BasisSet& basis, const PoissonSystem& sys,
                                   const GasModel& gas, double rho0_subtract) {
  if (spec.n < 1) throw ConfigError("polytropic index must be >= 1 for a gas equilibrium");
  if (mesh.dim == 2 && spec.n != 1)
    throw ConfigError("the 2D profile is only available for polytropic index 1");
  const double gam = spec.gamma();
  if (std::abs(gam - gas.gamma) > 1e-12)
    throw ConfigError("gas gamma must match the polytropic exponent (n+1)/n");

  EquilibriumField eq;
  eq.mesh = &mesh;
  eq.basis = &basis;
  const double a = spec.scale_length();
  const int dim = mesh.dim;
  const int n = spec.n;
  const auto c = spec.center;

  const bool planar = spec.symmetry == PolytropeSymmetry::Planar;
  if (planar && spec.n != 1) throw ConfigError("the planar profile is only available for n = 1");
  auto theta_of = [dim, n, planar](double r) {
    if (planar) return std::sin(r);
    return dim == 2 ? lane_emden_theta_2d(r) : lane_emden_theta_3d(n, r);
  };
  auto dtheta_of = [dim, n, planar](double r) {
    if (planar) return std::cos(r);
    return dim == 2 ? lane_emden_theta_2d_deriv(r) : lane_emden_theta_3d_deriv(n, r);
  };
  // Radial: scaled distance from the center. Planar: scaled coordinate along
  // the diagonal direction (1,..,1)/sqrt(d).
  auto radius = [c, a, dim, planar](const std::array<double, 3>& x) {
    double s = 0.0;
    if (planar) {
      for (int d = 0; d < dim; ++d) s += x[d] - c[d];
      return s / std::sqrt((double)dim) / a;
    }
    for (int d = 0; d < dim; ++d) s += (x[d] - c[d]) * (x[d] - c[d]);
    return std::sqrt(s) / a;
  };

  const double kappa = spec.kappa, lambda = spec.lambda;
  eq.rho_sampler = [=](const std::array<double, 3>& x) {
    return lambda * std::pow(theta_of(radius(x)), n);
  };
  eq.p_sampler = [=](const std::array<double, 3>& x) {
    return kappa * std::pow(lambda * std::pow(theta_of(radius(x)), n), gam);
  };
  eq.phi_sampler = [=](const std::array<double, 3>& x) {
    const double rho = lambda * std::pow(theta_of(radius(x)), n);
    return -kappa * gam / (gam - 1.0) * std::pow(rho, gam - 1.0);
  };
  eq.grad_p_sampler = [=](const std::array<double, 3>& x) -> std::array<double, 3> {
    const double r = radius(x);
    std::array<double, 3> out{0.0, 0.0, 0.0};
    if (!planar && std::abs(r) < 1e-300) return out;
    const double th = theta_of(r);
    const double rho = lambda * std::pow(th, n);
    // dp/dr = kappa gamma rho^(gamma-1) * lambda n theta^(n-1) theta'(r) / a
    const double dpdr = kappa * gam * std::pow(rho, gam - 1.0) * lambda * n *
                        std::pow(th, n - 1.0) * dtheta_of(r) / a;
    if (planar) {
      for (int d = 0; d < dim; ++d) out[d] = dpdr / std::sqrt((double)dim);
      return out;
    }
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += (x[d] - c[d]) * (x[d] - c[d]);
    s = std::sqrt(s);
    for (int d = 0; d < dim; ++d) out[d] = dpdr * (x[d] - c[d]) / s;
    return out;
  };

  // the profile must stay positive over the closed domain; scan the full
  // range of radii the box can reach (the profile may oscillate)
  {
    double rmax = 0.0, rmin = 1e300;
    for (int corner = 0; corner < (1 << dim); ++corner) {
      std::array<double, 3> x{0.0, 0.0, 0.0};
      for (int d = 0; d < dim; ++d) x[d] = (corner >> d) & 1 ? mesh.hi[d] : mesh.lo[d];
      rmax = std::max(rmax, radius(x));
      rmin = std::min(rmin, radius(x));
    }
    if (!planar) {
      double rmin2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double lodist = std::max({mesh.lo[d] - c[d], c[d] - mesh.hi[d], 0.0});
        rmin2 += lodist * lodist;
      }
      rmin = std::sqrt(rmin2) / a;
    }
    for (int i = 0; i <= 2000; ++i) {
      const double r = rmin + (rmax - rmin) * i / 2000.0;
      if (!(theta_of(r) > 0.0))
        throw ConfigError("domain extends past the first zero of the profile (theta <= 0)");
    }
  }

  eq.rho_h = l2_project(mesh, basis, 1,
                        [&](const std::array<double, 3>& x, double* v) { v[0] = eq.rho_sampler(x); });
  eq.p_h = l2_project(mesh, basis, 1,
                      [&](const std::array<double, 3>& x, double* v) { v[0] = eq.p_sampler(x); });
  finish_equilibrium(eq, sys, gas, rho0_subtract, false);
  return eq;
}

EquilibriumField build_uniform_equilibrium(double rho0, double p0, const CartesianMesh& mesh,
                                           const BasisSet& basis, const PoissonSystem& sys,
                                           const GasModel& gas) {
  if (!(rho0 > 0.0) || !(p0 > 0.0)) throw ConfigError("uniform background needs rho0, p0 > 0");
  EquilibriumField eq;
  eq.mesh = &mesh;
  eq.basis = &basis;
  eq.rho_sampler = [rho0](const std::array<double, 3>&) { return rho0; };
  eq.p_sampler = [p0](const std::array<double, 3>&) { return p0; };
  eq.phi_sampler = [](const std::array<double, 3>&) { return 0.0; };
  eq.grad_p_sampler = [](const std::array<double, 3>&) { return std::array<double, 3>{0, 0, 0}; };
  eq.rho_h = l2_project(mesh, basis, 1,
                        [&](const std::array<double, 3>&, double* v) { v[0] = rho0; });
  eq.p_h = l2_project(mesh, basis, 1, [&](const std::array<double, 3>&, double* v) { v[0] = p0; });
  finish_equilibrium(eq, sys, gas, rho0, true);
  return eq;
}

}  // namespace sgdg
