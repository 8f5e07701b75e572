#pragma once

#include <functional>

#include "sgdg/basis.hpp"
#include "sgdg/mesh.hpp"

namespace sgdg {

enum class FieldRole { Conserved, Potential, Gradient, Auxiliary };

// Broken polynomial field: modal coefficients per (element, component, mode)
// in the orthonormal basis, so the element mass matrix is the identity and
// mode 0 is the cell average times sqrt(|K|).
struct DGField {
  const CartesianMesh* mesh = nullptr;
  const BasisSet* basis = nullptr;
  int n_comp = 1;
  FieldRole role = FieldRole::Auxiliary;
  std::vector<double> coeff;

  DGField() = default;
  DGField(const CartesianMesh& m, const BasisSet& b, int nc, FieldRole r = FieldRole::Auxiliary)
      : mesh(&m), basis(&b), n_comp(nc), role(r),
        coeff((size_t)m.n_elements * nc * b.n_modes, 0.0) {}

  double& c(int e, int comp, int m) {
    return coeff[((size_t)e * n_comp + comp) * basis->n_modes + m];
  }
  double c(int e, int comp, int m) const {
    return coeff[((size_t)e * n_comp + comp) * basis->n_modes + m];
  }
  const double* modes(int e, int comp) const {
    return coeff.data() + ((size_t)e * n_comp + comp) * basis->n_modes;
  }
  double* modes(int e, int comp) {
    return coeff.data() + ((size_t)e * n_comp + comp) * basis->n_modes;
  }

  double eval_volume_node(int e, int comp, int q) const {
    const double* cm = modes(e, comp);
    const double* bv = basis->vol_value_row(q);
    double s = 0.0;
    for (int m = 0; m < basis->n_modes; ++m) s += cm[m] * bv[m];
    return s;
  }
  double eval_face_node(int e, int comp, int axis, int side, int node) const {
    const double* cm = modes(e, comp);
    const double* bv = basis->face_value_row(axis, side, node);
    double s = 0.0;
    for (int m = 0; m < basis->n_modes; ++m) s += cm[m] * bv[m];
    return s;
  }
  double eval_ref_point(int e, int comp, const std::array<double, 3>& xi) const;
  // gradient in physical coordinates at a reference point
  std::array<double, 3> eval_ref_gradient(int e, int comp, const std::array<double, 3>& xi) const;

  double cell_average(int e, int comp) const {
    return c(e, comp, 0) / basis->sqrt_cellvol;
  }
  void set_cell_average_shift(int comp, double delta) {
    // add a constant `delta` to one component
    for (int e = 0; e < mesh->n_elements; ++e) c(e, comp, 0) += delta * basis->sqrt_cellvol;
  }
};

using PointSampler = std::function<void(const std::array<double, 3>& x, double* values)>;

// L2 projection onto the broken space, evaluated with the (k+1)^d GL rule.
DGField l2_project(const CartesianMesh& mesh, const BasisSet& basis, int n_comp,
                   const PointSampler& fn, FieldRole role = FieldRole::Auxiliary);

// Quadrature projection of the pointwise product a_comp * b_comp (scaled),
// onto the basis of `a`. Both fields must share the mesh and quadrature nodes.
DGField project_product(const DGField& a, int comp_a, const DGField& b, int comp_b, double scale);

// divergence of a d-vector field, exact (the result lives in the same space)
DGField divergence(const DGField& vec);

// Quadrature projection of (rho - rho0) * phi / 2 onto the state's basis.
// Initialization, recovery, and the equilibrium build all share this one
// routine so the recovered energy inverts the initialization bit for bit.
DGField gravity_energy_projection(const DGField& state, int rho_comp, double rho0,
                                  const DGField& phi);

}  // namespace sgdg
