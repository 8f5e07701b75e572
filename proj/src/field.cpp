#include "sgdg/field.hpp"

#include <cmath>

#include "sgdg/errors.hpp"

namespace sgdg {

double DGField::eval_ref_point(int e, int comp, const std::array<double, 3>& xi) const {
  const double* cm = modes(e, comp);
  const double inv_sqrtJ = 1.0 / std::sqrt(basis->jac);
  double s = 0.0;
  for (int m = 0; m < basis->n_modes; ++m) s += cm[m] * basis->eval_ref(m, xi) * inv_sqrtJ;
  return s;
}

std::array<double, 3> DGField::eval_ref_gradient(int e, int comp,
                                                 const std::array<double, 3>& xi) const {
  const double* cm = modes(e, comp);
  const double inv_sqrtJ = 1.0 / std::sqrt(basis->jac);
  std::array<double, 3> g{0.0, 0.0, 0.0};
  for (int a = 0; a < basis->dim; ++a) {
    std::array<int, 3> ord{0, 0, 0};
    ord[a] = 1;
    double s = 0.0;
    for (int m = 0; m < basis->n_modes; ++m) s += cm[m] * basis->eval_ref_deriv(m, ord, xi);
    g[a] = s * inv_sqrtJ * 2.0 / basis->h[a];
  }
  return g;
}

DGField l2_project(const CartesianMesh& mesh, const BasisSet& basis, int n_comp,
                   const PointSampler& fn, FieldRole role) {
  DGField f(mesh, basis, n_comp, role);
  std::vector<double> vals(n_comp);
  for (int e = 0; e < mesh.n_elements; ++e) {
    for (int q = 0; q < basis.nq_vol; ++q) {
      const auto x = mesh.to_physical(e, basis.vol_ref[q]);
      fn(x, vals.data());
      const double wj = basis.vol_w[q] * basis.jac;
      const double* bv = basis.vol_value_row(q);
      for (int c = 0; c < n_comp; ++c) {
        if (!std::isfinite(vals[c]))
          throw NumericalError("non-finite sample in projection at element " + std::to_string(e));
        double* cm = f.modes(e, c);
        for (int m = 0; m < basis.n_modes; ++m) cm[m] += wj * vals[c] * bv[m];
      }
    }
  }
  return f;
}

DGField project_product(const DGField& a, int comp_a, const DGField& b, int comp_b, double scale) {
  const auto& basis = *a.basis;
  DGField out(*a.mesh, basis, 1, FieldRole::Auxiliary);
  for (int e = 0; e < a.mesh->n_elements; ++e) {
    double* cm = out.modes(e, 0);
    for (int q = 0; q < basis.nq_vol; ++q) {
      const double va = a.eval_volume_node(e, comp_a, q);
      const double vb = b.eval_volume_node(e, comp_b, q);
      const double wj = basis.vol_w[q] * basis.jac * scale * va * vb;
      const double* bv = basis.vol_value_row(q);
      for (int m = 0; m < basis.n_modes; ++m) cm[m] += wj * bv[m];
    }
  }
  return out;
}

DGField divergence(const DGField& vec) {
  const auto& basis = *vec.basis;
  const int dim = basis.dim;
  DGField out(*vec.mesh, basis, 1, FieldRole::Auxiliary);
  for (int e = 0; e < vec.mesh->n_elements; ++e) {
    double* cm = out.modes(e, 0);
    for (int q = 0; q < basis.nq_vol; ++q) {
      double div = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double* cma = vec.modes(e, a);
        const double* gr = vec.basis->vol_grad.data() + ((size_t)q * basis.n_modes) * 3;
        double s = 0.0;
        for (int m = 0; m < basis.n_modes; ++m) s += cma[m] * gr[m * 3 + a];
        div += s;
      }
      const double wj = basis.vol_w[q] * basis.jac * div;
      const double* bv = basis.vol_value_row(q);
      for (int m = 0; m < basis.n_modes; ++m) cm[m] += wj * bv[m];
    }
  }
  return out;
}

DGField gravity_energy_projection(const DGField& state, int rho_comp, double rho0,
                                  const DGField& phi) {
  const CartesianMesh& mesh = *state.mesh;
  const BasisSet& b = *state.basis;
  DGField out(mesh, b, 1, FieldRole::Auxiliary);
  for (int e = 0; e < mesh.n_elements; ++e) {
    double* cm = out.modes(e, 0);
    for (int q = 0; q < b.nq_vol; ++q) {
      const double val =
          0.5 * (state.eval_volume_node(e, rho_comp, q) - rho0) * phi.eval_volume_node(e, 0, q);
      const double wj = b.vol_w[q] * b.jac * val;
      const double* bv = b.vol_value_row(q);
      for (int m = 0; m < b.n_modes; ++m) cm[m] += wj * bv[m];
    }
  }
  return out;
}

}  // namespace sgdg
