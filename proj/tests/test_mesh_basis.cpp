#include <cmath>
#include <random>

#include "doctest.h"
#include "sgdg/basis.hpp"
#include "sgdg/errors.hpp"
#include "sgdg/field.hpp"
#include "sgdg/mesh.hpp"

using namespace sgdg;

TEST_CASE("mesh connectivity counts") {
  auto m = build_mesh(2, {0, 0, 0}, {1, 1, 1}, {2, 2, 1}, BoundaryTag::Transmissive);
  CHECK(m.n_elements == 4);
  CHECK(m.faces.size() == 12);
  int interior = 0, boundary = 0;
  for (auto& f : m.faces) (f.boundary ? boundary : interior)++;
  CHECK(interior == 4);
  CHECK(boundary == 8);

  auto mp = build_mesh(2, {0, 0, 0}, {1, 1, 1}, {2, 2, 1}, BoundaryTag::Periodic);
  CHECK(mp.faces.size() == 8);
  for (auto& f : mp.faces) {
    CHECK(!f.boundary);
    CHECK(f.left >= 0);
    CHECK(f.right >= 0);
  }

  auto m3 = build_mesh(3, {-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, {4, 4, 4}, BoundaryTag::Exact);
  CHECK(m3.h[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m3.h[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m3.h[2] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m3.diameter() == doctest::Approx(0.25 * std::sqrt(3.0)).epsilon(1e-14));

  CHECK_THROWS_AS(build_mesh(2, {0, 0, 0}, {1, 1, 1}, {0, 2, 1}, BoundaryTag::Exact), ConfigError);
  std::array<std::array<BoundaryTag, 2>, 3> bad;
  for (auto& t : bad) t = {BoundaryTag::Periodic, BoundaryTag::Periodic};
  bad[0][1] = BoundaryTag::Transmissive;
  CHECK_THROWS_AS(build_mesh(2, {0, 0, 0}, {1, 1, 1}, {2, 2, 1}, bad), ConfigError);
}

TEST_CASE("gauss rules") {
  auto r0 = gauss_rules(0);
  REQUIRE(r0.gl_x.size() == 1);
  CHECK(r0.gl_x[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r0.gl_w[0] == doctest::Approx(2.0).epsilon(1e-15));

  auto r1 = gauss_rules(1);
  CHECK(r1.gl_x[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r1.gl_x[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r1.gl_w[0] == doctest::Approx(1.0).epsilon(1e-14));

  // 3-point rule integrates x^5 exactly (odd, = 0) and x^4 (= 2/5)
  auto r2 = gauss_rules(2);
  double i5 = 0, i4 = 0;
  for (size_t i = 0; i < r2.gl_x.size(); ++i) {
    i5 += r2.gl_w[i] * std::pow(r2.gl_x[i], 5);
    i4 += r2.gl_w[i] * std::pow(r2.gl_x[i], 4);
  }
  CHECK(std::abs(i5) < 1e-15);
  CHECK(i4 == doctest::Approx(0.4).epsilon(1e-13));

  // exactness through degree 2m-1, weights sum to 2
  for (int k = 0; k <= 4; ++k) {
    auto r = gauss_rules(k);
    const int m = k + 1;
    for (int deg = 0; deg <= 2 * m - 1; ++deg) {
      double q = 0;
      for (size_t i = 0; i < r.gl_x.size(); ++i) q += r.gl_w[i] * std::pow(r.gl_x[i], deg);
      const double exact = (deg % 2 == 0) ? 2.0 / (deg + 1) : 0.0;
      CHECK(std::abs(q - exact) < 1e-13);
    }
    double ws = 0, wl = 0;
    for (double w : r.gl_w) ws += w;
    for (double w : r.lob_w) wl += w;
    CHECK(ws == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(wl == doctest::Approx(2.0).epsilon(1e-13));
    CHECK((int)r.lob_x.size() >= (k + 3 + 1) / 2);
  }
}

TEST_CASE("basis orthonormality and mass identity") {
  for (int dim = 1; dim <= 3; ++dim) {
    for (auto trunc : {BasisTrunc::TotalDegree, BasisTrunc::Tensor}) {
      const int k = 2;
      auto b = BasisSet::create(dim, k, trunc, {0.1, 0.2, 0.3});
      for (int i = 0; i < b.n_modes; ++i)
        for (int j = 0; j < b.n_modes; ++j) {
          double mij = 0;
          for (int q = 0; q < b.nq_vol; ++q)
            mij += b.vol_w[q] * b.jac * b.vol_value_row(q)[i] * b.vol_value_row(q)[j];
          CHECK(std::abs(mij - (i == j ? 1.0 : 0.0)) < 1e-13);
        }
      CHECK(b.mode_degree[0] == 0);
    }
  }
  // mode counts: P2 in 2D = 6, Q2 in 2D = 9, P2 in 3D = 10
  CHECK(BasisSet::create(2, 2, BasisTrunc::TotalDegree, {1, 1, 1}).n_modes == 6);
  CHECK(BasisSet::create(2, 2, BasisTrunc::Tensor, {1, 1, 1}).n_modes == 9);
  CHECK(BasisSet::create(3, 2, BasisTrunc::TotalDegree, {1, 1, 1}).n_modes == 10);
}

TEST_CASE("basis gradient vs finite differences") {
  auto b = BasisSet::create(2, 3, BasisTrunc::TotalDegree, {1, 1, 1});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  const double eps = 1e-6;
  for (int m = 0; m < b.n_modes; ++m)
    for (int rep = 0; rep < 5; ++rep) {
      std::array<double, 3> xi{U(rng), U(rng), 0.0};
      for (int a = 0; a < 2; ++a) {
        std::array<int, 3> ord{0, 0, 0};
        ord[a] = 1;
        auto xp = xi, xm = xi;
        xp[a] += eps;
        xm[a] -= eps;
        const double fd = (b.eval_ref(m, xp) - b.eval_ref(m, xm)) / (2 * eps);
        const double an = b.eval_ref_deriv(m, ord, xi);
        CHECK(std::abs(fd - an) < 5e-9 * std::max(1.0, std::abs(an)));
      }
    }
}

TEST_CASE("projection reproduces polynomials and averages") {
  auto mesh = build_mesh(2, {0, 0, 0}, {1, 1, 1}, {3, 3, 1}, BoundaryTag::Transmissive);
  auto basis = BasisSet::create(2, 2, BasisTrunc::TotalDegree, mesh.h);

  auto cf = l2_project(mesh, basis, 1, [](const std::array<double, 3>&, double* v) { v[0] = 7.0; });
  for (int e = 0; e < mesh.n_elements; ++e) {
    CHECK(cf.cell_average(e, 0) == doctest::Approx(7.0).epsilon(1e-14));
    for (int m = 1; m < basis.n_modes; ++m) CHECK(std::abs(cf.c(e, 0, m)) < 1e-13);
  }

  auto xf = l2_project(mesh, basis, 1,
                       [](const std::array<double, 3>& x, double* v) { v[0] = x[0]; });
  for (int e = 0; e < mesh.n_elements; ++e)
    for (int q = 0; q < basis.nq_vol; ++q) {
      const auto x = mesh.to_physical(e, basis.vol_ref[q]);
      CHECK(xf.eval_volume_node(e, 0, q) == doctest::Approx(x[0]).epsilon(1e-13));
    }

  // gradient of projected x*y is (y, x) for k >= 2
  auto xy = l2_project(mesh, basis, 1,
                       [](const std::array<double, 3>& x, double* v) { v[0] = x[0] * x[1]; });
  for (int q = 0; q < basis.nq_vol; ++q) {
    const auto x = mesh.to_physical(4, basis.vol_ref[q]);
    const auto gr = xy.eval_ref_gradient(4, 0, basis.vol_ref[q]);
    CHECK(gr[0] == doctest::Approx(x[1]).epsilon(1e-12));
    CHECK(gr[1] == doctest::Approx(x[0]).epsilon(1e-12));
  }
}

TEST_CASE("projection of x^2 with k=1 matches the normal-equations fit") {
  // one cell [0,1]: best linear fit of x^2 solved densely from the Gram system
  auto mesh = build_mesh(1, {0, 0, 0}, {1, 1, 1}, {1, 1, 1}, BoundaryTag::Transmissive);
  auto basis = BasisSet::create(1, 1, BasisTrunc::TotalDegree, mesh.h);
  auto f = l2_project(mesh, basis, 1,
                      [](const std::array<double, 3>& x, double* v) { v[0] = x[0] * x[0]; });
  // fit c0 + c1 x: [[1,1/2],[1/2,1/3]] [c0,c1] = [1/3,1/4] -> c0=-1/6, c1=1
  const double c0 = -1.0 / 6.0, c1 = 1.0;
  for (double xp : {0.1, 0.5, 0.9}) {
    std::array<double, 3> xi{2 * xp - 1, 0, 0};
    CHECK(f.eval_ref_point(0, 0, xi) == doctest::Approx(c0 + c1 * xp).epsilon(1e-12));
  }
}

TEST_CASE("projection idempotence") {
  auto mesh = build_mesh(2, {0, 0, 0}, {1, 1, 1}, {2, 2, 1}, BoundaryTag::Transmissive);
  auto basis = BasisSet::create(2, 2, BasisTrunc::TotalDegree, mesh.h);
  auto f = l2_project(mesh, basis, 1, [](const std::array<double, 3>& x, double* v) {
    v[0] = std::sin(3 * x[0]) * std::cos(2 * x[1]);
  });
  // re-project the field's own point values
  auto g = l2_project(mesh, basis, 1, [&](const std::array<double, 3>& x, double* v) {
    // invert the affine map to locate the element/ref point
    int i = std::min((int)(x[0] / mesh.h[0]), mesh.cells[0] - 1);
    int j = std::min((int)(x[1] / mesh.h[1]), mesh.cells[1] - 1);
    std::array<double, 3> xi{(x[0] - mesh.lo[0]) / mesh.h[0] * 2 - 1 - 2 * i,
                             (x[1] - mesh.lo[1]) / mesh.h[1] * 2 - 1 - 2 * j, 0.0};
    v[0] = f.eval_ref_point(mesh.index(i, j, 0), 0, xi);
  });
  for (size_t i = 0; i < f.coeff.size(); ++i) CHECK(std::abs(f.coeff[i] - g.coeff[i]) < 1e-13);

  // non-finite rejection
  CHECK_THROWS_AS(
      l2_project(mesh, basis, 1,
                 [](const std::array<double, 3>&, double* v) { v[0] = std::nan(""); }),
      NumericalError);
}
