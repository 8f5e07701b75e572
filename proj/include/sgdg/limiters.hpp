#pragma once

#include "sgdg/euler.hpp"
#include "sgdg/field.hpp"

namespace sgdg {

struct PPParams {
  double floor = 1e-13;  // density and pressure floor
};

// Oscillation damping: multiplies the degree-j mode block of every component
// by exp(-dt * sum_{m<=j} rate_m), with rates built from interface jump
// seminorms of `field` itself. When `reference` is given (the discrete
// equilibrium), only the deviation from it is damped; the rates still come
// from the full field. Cell averages are never touched.
// `beta_axis[e*3+a]` is the local wave-speed bound |u_a| + c at the cell
// average. Returns the number of damped elements.
long oe_damp(DGField& field, double dt, const std::vector<double>& beta_axis,
             const DGField* reference = nullptr);

// Per-cell scaling toward the cell average until density and pressure are at
// least `floor` at every check node. The energy argument of the pressure is
// field component dim+1 minus `grav_product` when given (total-energy
// storage); the correction is added back so cell averages of every component
// are preserved exactly. Returns the number of limited cells; throws when a
// cell average itself is invalid.
long pp_limit(DGField& field, const DGField* grav_product, const GasModel& gas,
              const PPParams& params);

// check-node set used by the positivity limiter (reference coordinates)
std::vector<std::array<double, 3>> pp_check_nodes(const BasisSet& basis);

}  // namespace sgdg
