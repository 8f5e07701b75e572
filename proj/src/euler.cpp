#include "sgdg/euler.hpp"

#include <algorithm>
#include <cmath>

#include "sgdg/errors.hpp"

namespace sgdg {

Primitive cons_to_prim(const EulerState& s, const GasModel& gas, int dim) {
  Primitive w;
  w.rho = s.rho;
  if (!(s.rho > 0.0)) {
    w.valid = false;
    return w;
  }
  double ke = 0.0;
  for (int a = 0; a < dim; ++a) {
    w.u[a] = s.m[a] / s.rho;
    ke += s.m[a] * w.u[a];
  }
  w.p = (gas.gamma - 1.0) * (s.E - 0.5 * ke);
  w.valid = w.p > 0.0;
  w.c = w.valid ? std::sqrt(gas.gamma * w.p / w.rho) : 0.0;
  return w;
}

EulerState prim_to_cons(const Primitive& w, const GasModel& gas, int dim) {
  EulerState s;
  s.rho = w.rho;
  double ke = 0.0;
  for (int a = 0; a < dim; ++a) {
    s.m[a] = w.rho * w.u[a];
    ke += w.u[a] * w.u[a];
  }
  s.E = w.p / (gas.gamma - 1.0) + 0.5 * w.rho * ke;
  return s;
}

void physical_flux(const EulerState& s, const GasModel& gas, int dim,
                   std::array<std::array<double, 5>, 3>& flux) {
  const Primitive w = cons_to_prim(s, gas, dim);
  if (!(s.rho > 0.0)) throw NumericalError("physical_flux on nonpositive density");
  for (int a = 0; a < dim; ++a) {
    flux[a][0] = s.m[a];
    for (int b = 0; b < dim; ++b) flux[a][1 + b] = s.m[a] * w.u[b];
    flux[a][1 + a] += w.p;
    flux[a][1 + dim] = (s.E + w.p) * w.u[a];
  }
}

namespace {

inline void normal_flux(const EulerState& s, const Primitive& w, double un,
                        const std::array<double, 3>& n, int dim, double* out) {
  out[0] = s.rho * un;
  for (int a = 0; a < dim; ++a) out[1 + a] = s.m[a] * un + w.p * n[a];
  out[1 + dim] = (s.E + w.p) * un;
}

}  // namespace

void hllc_flux(const EulerState& l, const EulerState& r, const std::array<double, 3>& n,
               const GasModel& gas, int dim, double* out) {
  const int nc = dim + 2;
  const Primitive wl = cons_to_prim(l, gas, dim);
  const Primitive wr = cons_to_prim(r, gas, dim);
  double unl = 0.0, unr = 0.0;
  for (int a = 0; a < dim; ++a) {
    unl += wl.u[a] * n[a];
    unr += wr.u[a] * n[a];
  }
  const double sl = std::min(unl - wl.c, unr - wr.c);
  const double sr = std::max(unl + wl.c, unr + wr.c);

  if (0.0 <= sl) {
    normal_flux(l, wl, unl, n, dim, out);
    return;
  }
  if (0.0 >= sr) {
    normal_flux(r, wr, unr, n, dim, out);
    return;
  }

  const double denom = l.rho * (sl - unl) - r.rho * (sr - unr);
  if (denom == 0.0) {
    // coincident wave speeds: fall back to the HLL mean
    double fl[5], fr[5];
    normal_flux(l, wl, unl, n, dim, fl);
    normal_flux(r, wr, unr, n, dim, fr);
    const double inv = 1.0 / (sr - sl);
    for (int c = 0; c < nc; ++c) {
      const double ul = (c == 0) ? l.rho : (c <= dim ? l.m[c - 1] : l.E);
      const double ur = (c == 0) ? r.rho : (c <= dim ? r.m[c - 1] : r.E);
      out[c] = (sr * fl[c] - sl * fr[c] + sl * sr * (ur - ul)) * inv;
    }
    return;
  }
  const double sstar = (wr.p - wl.p + l.rho * unl * (sl - unl) - r.rho * unr * (sr - unr)) / denom;

  const bool left = 0.0 <= sstar;
  const EulerState& s = left ? l : r;
  const Primitive& w = left ? wl : wr;
  const double si = left ? sl : sr;
  const double un = left ? unl : unr;

  double f[5];
  normal_flux(s, w, un, n, dim, f);
  // star state in ratio form, so a rest state maps to itself exactly
  const double ratio = (si - un) / (si - sstar);
  const double dm = s.rho * (sstar - un);
  double ustar[5];
  ustar[0] = ratio * s.rho;
  for (int a = 0; a < dim; ++a) ustar[1 + a] = ratio * (s.m[a] + dm * n[a]);
  ustar[1 + dim] = ratio * (s.E + dm * (sstar + w.p / (s.rho * (si - un))));
  const double uc[5] = {s.rho, s.m[0], s.m[1], s.m[2], 0.0};
  for (int c = 0; c < nc; ++c) {
    const double u0 = (c == 0) ? s.rho : (c <= dim ? uc[c] : s.E);
    out[c] = f[c] + si * (ustar[c] - u0);
  }
}

double wb_hllc_flux(const EulerState& l, const EulerState& r, double pe_l, double pe_r,
                    const std::array<double, 3>& n, const GasModel& gas, int dim, double* out) {
  if (!(pe_l > 0.0) || !(pe_r > 0.0))
    throw NumericalError("nonpositive equilibrium pressure trace in flux rescaling");
  const double pe_star = 0.5 * (pe_l + pe_r);
  // scale in primitive form: when the input pressure equals the equilibrium
  // trace, both rescaled states carry the face-averaged pressure exactly,
  // which keeps the rest-state mass and energy fluxes at hard zeros
  auto rescale = [&](const EulerState& s, double pe) {
    const double alpha = pe_star / pe;
    double ke = 0.0;
    for (int a = 0; a < dim; ++a) ke += s.m[a] * s.m[a];
    ke = 0.5 * ke / s.rho;
    const double p = (gas.gamma - 1.0) * (s.E - ke);
    EulerState o;
    o.rho = alpha * s.rho;
    for (int a = 0; a < dim; ++a) o.m[a] = alpha * s.m[a];
    o.E = (p / pe) * pe_star / (gas.gamma - 1.0) + alpha * ke;
    return o;
  };
  hllc_flux(rescale(l, pe_l), rescale(r, pe_r), n, gas, dim, out);
  return pe_star;
}

}  // namespace sgdg
