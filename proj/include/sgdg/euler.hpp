#pragma once

#include <array>

namespace sgdg {

struct GasModel {
  double gamma = 1.4;
  double G = 1.0;  // gravitational constant
};

// conserved state (rho, momentum, non-gravitational energy); dim passed explicitly
struct EulerState {
  double rho = 0.0;
  std::array<double, 3> m{0.0, 0.0, 0.0};
  double E = 0.0;
};

struct Primitive {
  double rho = 0.0;
  std::array<double, 3> u{0.0, 0.0, 0.0};
  double p = 0.0;
  double c = 0.0;
  bool valid = false;  // rho > 0 and p > 0
};

Primitive cons_to_prim(const EulerState& s, const GasModel& gas, int dim);
EulerState prim_to_cons(const Primitive& w, const GasModel& gas, int dim);

// F(U): columns are per-axis fluxes of (mass, momentum, energy)
void physical_flux(const EulerState& s, const GasModel& gas, int dim,
                   std::array<std::array<double, 5>, 3>& flux);

// multidimensional HLLC flux in direction n (unit vector); out has dim+2 entries
void hllc_flux(const EulerState& l, const EulerState& r, const std::array<double, 3>& n,
               const GasModel& gas, int dim, double* out);

// hydrostatically rescaled flux: both inputs are scaled by the face average of
// the equilibrium pressure traces before the HLLC evaluation. Returns the
// average trace used, so source terms can reuse the identical value.
double wb_hllc_flux(const EulerState& l, const EulerState& r, double pe_l, double pe_r,
                    const std::array<double, 3>& n, const GasModel& gas, int dim, double* out);

}  // namespace sgdg
