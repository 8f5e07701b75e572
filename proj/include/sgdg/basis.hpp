#pragma once

#include <array>
#include <vector>

namespace sgdg {

// m-th derivative of the Legendre polynomial P_n at x
double legendre_deriv(int n, int m, double x);
inline double legendre(int n, double x) { return legendre_deriv(n, 0, x); }

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);
void gauss_lobatto(int n, std::vector<double>& x, std::vector<double>& w);

// 1D rules on [-1,1]: (k+1)-point Gauss-Legendre plus a Gauss-Lobatto
// companion with enough points for positivity checks.
struct QuadratureRule {
  std::vector<double> gl_x, gl_w;
  std::vector<double> lob_x, lob_w;
};
QuadratureRule gauss_rules(int k);

enum class BasisTrunc { TotalDegree, Tensor };  // P^k vs Q^k

// Orthonormal tensor-product Legendre basis with precomputed evaluation
// tables at the tensorized volume and face quadrature nodes. All tables are
// in physical normalization: values carry the 1/sqrt(|K|) factor and
// gradients the 2/h_axis chain rule, so they are shared by every element of
// a uniform mesh.
struct BasisSet {
  int dim = 2;
  int degree = 1;
  BasisTrunc trunc = BasisTrunc::TotalDegree;
  int n_modes = 0;
  int nq1 = 2;       // 1D quadrature points, k+1
  int nq_vol = 0;    // nq1^dim
  int nq_face = 0;   // nq1^(dim-1)
  std::array<double, 3> h{1.0, 1.0, 1.0};
  double jac = 1.0;                       // prod h_a/2
  std::array<double, 3> face_jac{};       // per axis: prod_{t != a} h_t/2
  double sqrt_cellvol = 1.0;              // constant c -> mode-0 coeff c*sqrt_cellvol

  std::vector<std::array<int, 3>> alpha;  // per-mode exponents, sorted by |alpha| then lex
  std::vector<int> mode_degree;

  QuadratureRule rule;

  // volume tables
  std::vector<std::array<double, 3>> vol_ref;  // node reference coords
  std::vector<double> vol_w;                   // tensor reference weights
  std::vector<double> vol_val;                 // [q * n_modes + m]
  std::vector<double> vol_grad;                // [(q * n_modes + m) * 3 + axis]

  // face tables, slot = axis * 2 + side (side 0: xi_axis = -1, side 1: +1)
  std::vector<double> face_w;                  // [node], tangential tensor weights
  std::vector<std::array<double, 3>> face_ref; // [slot * nq_face + node]
  std::vector<double> face_val;                // [(slot * nq_face + node) * n_modes + m]

  // all physical derivatives up to total order `degree` at face nodes (for
  // the oscillation damping seminorms); beta multi-indices listed below
  std::vector<std::array<int, 3>> beta;
  std::vector<double> face_deriv;  // [((slot*nq_face + node) * nbeta + b) * n_modes + m]

  static BasisSet create(int dim, int degree, BasisTrunc trunc, const std::array<double, 3>& h);

  int slot(int axis, int side) const { return axis * 2 + side; }
  const double* vol_value_row(int q) const { return vol_val.data() + q * n_modes; }
  const double* face_value_row(int axis, int side, int node) const {
    return face_val.data() + (slot(axis, side) * nq_face + node) * n_modes;
  }
  const double* face_deriv_row(int axis, int side, int node, int b) const {
    return face_deriv.data() + ((slot(axis, side) * nq_face + node) * (int)beta.size() + b) * n_modes;
  }

  // reference-space value/derivative of one mode at an arbitrary point
  // (no physical normalization; used for generic point evaluation)
  double eval_ref(int mode, const std::array<double, 3>& xi) const;
  double eval_ref_deriv(int mode, const std::array<int, 3>& order, const std::array<double, 3>& xi) const;
};

}  // namespace sgdg
