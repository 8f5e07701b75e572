#include "sgdg/basis.hpp"

#include <algorithm>
#include <cmath>

#include "sgdg/errors.hpp"

namespace sgdg {

double legendre_deriv(int n, int m, double x) {
  if (m < 0) return 0.0;
  // recurrence (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}, differentiated m times
  std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0), next(m + 1, 0.0);
  prev[0] = 1.0;  // P_0 derivatives
  if (n == 0) return prev[m];
  cur[0] = x;     // P_1
  if (m >= 1) cur[1] = 1.0;
  for (int j = 1; j < n; ++j) {
    for (int d = 0; d <= m; ++d) {
      const double xd = x * cur[d] + (d > 0 ? d * cur[d - 1] : 0.0);
      next[d] = ((2.0 * j + 1.0) * xd - j * prev[d]) / (j + 1.0);
    }
    prev = cur;
    cur = next;
  }
  return cur[m];
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton from the Chebyshev-like initial guess
    double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const double p = legendre(n, xi);
      const double dp = legendre_deriv(n, 1, xi);
      const double dx = p / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_deriv(n, 1, xi);
    x[n - 1 - i] = xi;
    w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  // symmetrize to kill roundoff asymmetry
  for (int i = 0; i < n / 2; ++i) {
    const double xs = 0.5 * (x[i] - x[n - 1 - i]);
    x[i] = xs;
    x[n - 1 - i] = -xs;
    const double ws = 0.5 * (w[i] + w[n - 1 - i]);
    w[i] = w[n - 1 - i] = ws;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

void gauss_lobatto(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 2) throw NumericalError("Gauss-Lobatto needs at least 2 points");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  x[0] = -1.0;
  x[n - 1] = 1.0;
  const int nm = n - 1;
  for (int i = 1; i < nm; ++i) {
    // interior nodes are the roots of P'_{n-1}
    double xi = std::cos(M_PI * i / nm);
    for (int it = 0; it < 100; ++it) {
      const double dp = legendre_deriv(nm, 1, xi);
      const double d2p = legendre_deriv(nm, 2, xi);
      const double dx = dp / d2p;
      xi -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    x[n - 1 - i] = xi;
  }
  std::sort(x.begin(), x.end());
  for (int i = 0; i < n; ++i) {
    const double p = legendre(nm, x[i]);
    w[i] = 2.0 / (nm * n * p * p);
  }
}

QuadratureRule gauss_rules(int k) {
  if (k < 0) throw ConfigError("polynomial degree must be >= 0");
  QuadratureRule r;
  gauss_legendre(k + 1, r.gl_x, r.gl_w);
  const int nl = std::max(2, (k + 4) / 2);  // ceil((k+3)/2)
  gauss_lobatto(nl, r.lob_x, r.lob_w);
  return r;
}

namespace {
// orthonormal 1D Legendre on [-1,1]: sqrt((2n+1)/2) P_n, and its derivatives
double onorm1d(int n, int m, double x) {
  return std::sqrt((2.0 * n + 1.0) / 2.0) * legendre_deriv(n, m, x);
}
}  // namespace

double BasisSet::eval_ref(int mode, const std::array<double, 3>& xi) const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= onorm1d(alpha[mode][a], 0, xi[a]);
  return v;
}

double BasisSet::eval_ref_deriv(int mode, const std::array<int, 3>& order,
                                const std::array<double, 3>& xi) const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= onorm1d(alpha[mode][a], order[a], xi[a]);
  return v;
}

BasisSet BasisSet::create(int dim, int degree, BasisTrunc trunc, const std::array<double, 3>& h) {
  if (degree < 0) throw ConfigError("polynomial degree must be >= 0");
  BasisSet b;
  b.dim = dim;
  b.degree = degree;
  b.trunc = trunc;
  b.h = h;
  b.nq1 = degree + 1;
  b.rule = gauss_rules(degree);

  const int k = degree;
  for (int az = 0; az <= (dim > 2 ? k : 0); ++az)
    for (int ay = 0; ay <= (dim > 1 ? k : 0); ++ay)
      for (int ax = 0; ax <= k; ++ax) {
        if (trunc == BasisTrunc::TotalDegree && ax + ay + az > k) continue;
        b.alpha.push_back({ax, ay, az});
      }
  std::sort(b.alpha.begin(), b.alpha.end(), [](const auto& p, const auto& q) {
    const int dp = p[0] + p[1] + p[2], dq = q[0] + q[1] + q[2];
    if (dp != dq) return dp < dq;
    return p < q;
  });
  b.n_modes = (int)b.alpha.size();
  for (auto& a : b.alpha) b.mode_degree.push_back(a[0] + a[1] + a[2]);

  b.jac = 1.0;
  double cellvol = 1.0;
  for (int a = 0; a < dim; ++a) {
    b.jac *= h[a] / 2.0;
    cellvol *= h[a];
  }
  b.sqrt_cellvol = std::sqrt(cellvol);
  for (int a = 0; a < dim; ++a) {
    double fj = 1.0;
    for (int t = 0; t < dim; ++t)
      if (t != a) fj *= h[t] / 2.0;
    b.face_jac[a] = fj;
  }
  const double inv_sqrtJ = 1.0 / std::sqrt(b.jac);

  // 1D value/derivative tables at the GL nodes and at the endpoints
  const auto& gx = b.rule.gl_x;
  const auto& gw = b.rule.gl_w;

  // volume nodes: tensor over dims
  b.nq_vol = 1;
  for (int a = 0; a < dim; ++a) b.nq_vol *= b.nq1;
  b.vol_ref.resize(b.nq_vol);
  b.vol_w.resize(b.nq_vol);
  b.vol_val.resize((size_t)b.nq_vol * b.n_modes);
  b.vol_grad.assign((size_t)b.nq_vol * b.n_modes * 3, 0.0);
  for (int q = 0; q < b.nq_vol; ++q) {
    int rem = q;
    std::array<int, 3> id{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      id[a] = rem % b.nq1;
      rem /= b.nq1;
    }
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      xi[a] = gx[id[a]];
      w *= gw[id[a]];
    }
    b.vol_ref[q] = xi;
    b.vol_w[q] = w;
    for (int m = 0; m < b.n_modes; ++m) {
      b.vol_val[q * b.n_modes + m] = b.eval_ref(m, xi) * inv_sqrtJ;
      for (int a = 0; a < dim; ++a) {
        std::array<int, 3> ord{0, 0, 0};
        ord[a] = 1;
        b.vol_grad[((size_t)q * b.n_modes + m) * 3 + a] =
            b.eval_ref_deriv(m, ord, xi) * inv_sqrtJ * (2.0 / h[a]);
      }
    }
  }

  // derivative multi-indices for damping seminorms
  for (int dz = 0; dz <= (dim > 2 ? k : 0); ++dz)
    for (int dy = 0; dy <= (dim > 1 ? k : 0); ++dy)
      for (int dx = 0; dx <= k; ++dx)
        if (dx + dy + dz <= k) b.beta.push_back({dx, dy, dz});
  std::sort(b.beta.begin(), b.beta.end(), [](const auto& p, const auto& q) {
    const int dp = p[0] + p[1] + p[2], dq = q[0] + q[1] + q[2];
    if (dp != dq) return dp < dq;
    return p < q;
  });

  // face nodes: tensor over tangential axes (increasing axis order)
  b.nq_face = 1;
  for (int a = 0; a < dim - 1; ++a) b.nq_face *= b.nq1;
  b.face_w.resize(b.nq_face);
  b.face_ref.resize((size_t)2 * dim * b.nq_face);
  b.face_val.resize((size_t)2 * dim * b.nq_face * b.n_modes);
  b.face_deriv.resize((size_t)2 * dim * b.nq_face * b.beta.size() * b.n_modes);
  for (int axis = 0; axis < dim; ++axis) {
    std::vector<int> tang;
    for (int a = 0; a < dim; ++a)
      if (a != axis) tang.push_back(a);
    for (int side = 0; side < 2; ++side) {
      for (int node = 0; node < b.nq_face; ++node) {
        int rem = node;
        std::array<double, 3> xi{0.0, 0.0, 0.0};
        double w = 1.0;
        for (size_t t = 0; t < tang.size(); ++t) {
          const int i1 = rem % b.nq1;
          rem /= b.nq1;
          xi[tang[t]] = gx[i1];
          w *= gw[i1];
        }
        xi[axis] = side == 0 ? -1.0 : 1.0;
        if (axis == 0) b.face_w[node] = w;  // same for every axis
        const size_t base = (size_t)b.slot(axis, side) * b.nq_face + node;
        b.face_ref[base] = xi;
        for (int m = 0; m < b.n_modes; ++m)
          b.face_val[base * b.n_modes + m] = b.eval_ref(m, xi) * inv_sqrtJ;
        // reference-coordinate derivatives: the length scale of the damping
        // seminorms lives inside the jump, (h/2)^|beta| per axis
        for (size_t bi = 0; bi < b.beta.size(); ++bi) {
          for (int m = 0; m < b.n_modes; ++m)
            b.face_deriv[(base * b.beta.size() + bi) * b.n_modes + m] =
                b.eval_ref_deriv(m, b.beta[bi], xi) * inv_sqrtJ;
        }
      }
    }
  }
  return b;
}

}  // namespace sgdg
