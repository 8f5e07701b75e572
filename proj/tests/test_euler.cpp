#include <cmath>
#include <random>

#include "doctest.h"
#include "sgdg/euler.hpp"

using namespace sgdg;

namespace {
std::array<double, 3> unit2(double ang) { return {std::cos(ang), std::sin(ang), 0.0}; }
}  // namespace

TEST_CASE("cons/prim round trip") {
  GasModel gas{1.4, 1.0};
  EulerState s{1.0, {0, 0, 0}, 1.0 / (gas.gamma - 1.0)};
  auto w = cons_to_prim(s, gas, 2);
  CHECK(w.p == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w.u[0] == 0.0);

  EulerState s2{1.0, {1, 0, 0}, 1.0 / (gas.gamma - 1.0) + 0.5};
  auto w2 = cons_to_prim(s2, gas, 2);
  CHECK(w2.u[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w2.p == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.1, 3.0), V(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    Primitive w3;
    w3.rho = U(rng);
    w3.u = {V(rng), V(rng), 0.0};
    w3.p = U(rng);
    auto s3 = prim_to_cons(w3, gas, 2);
    auto r3 = cons_to_prim(s3, gas, 2);
    CHECK(r3.rho == doctest::Approx(w3.rho).epsilon(1e-14));
    CHECK(r3.p == doctest::Approx(w3.p).epsilon(1e-14));
    CHECK(r3.u[0] == doctest::Approx(w3.u[0]).epsilon(1e-13));
    CHECK(r3.valid);
  }

  EulerState bad{1.0, {0, 0, 0}, -1.0};
  CHECK(!cons_to_prim(bad, gas, 2).valid);
  EulerState bad2{-1.0, {0, 0, 0}, 1.0};
  CHECK(!cons_to_prim(bad2, gas, 2).valid);
}

TEST_CASE("physical flux structure") {
  GasModel gas{1.4, 1.0};
  std::array<std::array<double, 5>, 3> fl{};
  EulerState rest{2.0, {0, 0, 0}, 5.0};
  physical_flux(rest, gas, 2, fl);
  const double p = (gas.gamma - 1.0) * 5.0;
  CHECK(fl[0][0] == 0.0);
  CHECK(fl[0][3] == 0.0);
  CHECK(fl[0][1] == doctest::Approx(p).epsilon(1e-14));
  CHECK(fl[0][2] == 0.0);
  CHECK(fl[1][2] == doctest::Approx(p).epsilon(1e-14));

  // rotate velocity by 90 degrees: flux columns permute
  Primitive w;
  w.rho = 1.3;
  w.u = {0.7, 0.0, 0.0};
  w.p = 2.0;
  auto a = prim_to_cons(w, gas, 2);
  std::swap(w.u[0], w.u[1]);
  auto b = prim_to_cons(w, gas, 2);
  std::array<std::array<double, 5>, 3> fa{}, fb{};
  physical_flux(a, gas, 2, fa);
  physical_flux(b, gas, 2, fb);
  CHECK(fa[0][0] == doctest::Approx(fb[1][0]).epsilon(1e-14));
  CHECK(fa[0][1] == doctest::Approx(fb[1][2]).epsilon(1e-14));
  CHECK(fa[0][3] == doctest::Approx(fb[1][3]).epsilon(1e-14));

  // 1D alignment: v = 0 reproduces the textbook x-flux
  EulerState s1{1.0, {2.0, 0, 0}, 6.0};
  physical_flux(s1, gas, 2, fa);
  const double u = 2.0, pp = (gas.gamma - 1) * (6.0 - 0.5 * 4.0);
  CHECK(fa[0][0] == doctest::Approx(1.0 * u));
  CHECK(fa[0][1] == doctest::Approx(u * 2.0 + pp));
  CHECK(fa[0][3] == doctest::Approx((6.0 + pp) * u));
}

TEST_CASE("hllc contact property and consistency") {
  GasModel gas{1.4, 1.0};
  double f[5];

  EulerState l{1.0, {0, 0, 0}, 1.0 / (gas.gamma - 1.0)};
  EulerState r{2.0, {0, 0, 0}, 1.0 / (gas.gamma - 1.0)};
  hllc_flux(l, r, {1, 0, 0}, gas, 2, f);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f[2] == 0.0);
  CHECK(f[3] == 0.0);

  // randomized contact property, oblique normals
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.05, 10.0), A(0.0, 2 * M_PI);
  for (int i = 0; i < 10000; ++i) {
    const double p = U(rng);
    EulerState a{U(rng), {0, 0, 0}, p / (gas.gamma - 1.0)};
    EulerState b{U(rng), {0, 0, 0}, p / (gas.gamma - 1.0)};
    const auto n = unit2(A(rng));
    hllc_flux(a, b, n, gas, 2, f);
    CHECK(std::abs(f[0]) <= 1e-13);
    CHECK(std::abs(f[1] - p * n[0]) <= 1e-13 * std::max(1.0, p));
    CHECK(std::abs(f[2] - p * n[1]) <= 1e-13 * std::max(1.0, p));
    CHECK(std::abs(f[3]) <= 1e-13);
  }

  // consistency hllc(U,U,n) = F(U).n
  Primitive w;
  w.rho = 1.1;
  w.u = {0.3, -0.2, 0};
  w.p = 0.7;
  auto s = prim_to_cons(w, gas, 2);
  const auto n = unit2(0.3);
  hllc_flux(s, s, n, gas, 2, f);
  std::array<std::array<double, 5>, 3> pf{};
  physical_flux(s, gas, 2, pf);
  for (int c = 0; c < 4; ++c)
    CHECK(f[c] == doctest::Approx(pf[0][c] * n[0] + pf[1][c] * n[1]).epsilon(1e-13));

  // supersonic branch returns the upwind physical flux
  Primitive ws;
  ws.rho = 1.0;
  ws.p = 1.0;
  ws.u = {3.0 * std::sqrt(1.4), 0, 0};
  auto ss = prim_to_cons(ws, gas, 2);
  Primitive wr = ws;
  wr.u[0] *= 1.1;
  auto sr = prim_to_cons(wr, gas, 2);
  hllc_flux(ss, sr, {1, 0, 0}, gas, 2, f);
  physical_flux(ss, gas, 2, pf);
  for (int c = 0; c < 4; ++c) CHECK(f[c] == doctest::Approx(pf[0][c]).epsilon(1e-14));
}

TEST_CASE("hllc antisymmetry (shared face evaluation)") {
  GasModel gas{5.0 / 3.0, 1.0};
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(0.1, 2.0), V(-1.0, 1.0), A(0.0, 2 * M_PI);
  double f1[5], f2[5];
  for (int i = 0; i < 500; ++i) {
    Primitive wl, wr;
    wl.rho = U(rng);
    wl.u = {V(rng), V(rng), 0};
    wl.p = U(rng);
    wr.rho = U(rng);
    wr.u = {V(rng), V(rng), 0};
    wr.p = U(rng);
    auto l = prim_to_cons(wl, gas, 2), r = prim_to_cons(wr, gas, 2);
    auto n = unit2(A(rng));
    hllc_flux(l, r, n, gas, 2, f1);
    hllc_flux(r, l, {-n[0], -n[1], 0}, gas, 2, f2);
    for (int c = 0; c < 4; ++c)
      CHECK(std::abs(f1[c] + f2[c]) <= 1e-13 * std::max(1.0, std::abs(f1[c])));
  }
}

TEST_CASE("rescaled flux reductions") {
  GasModel gas{2.0, 1.0};
  double f[5];
  // equilibrium traces: pure pressure flux with the averaged trace
  const double pl = 0.8, pr = 1.3;
  EulerState l{1.0, {0, 0, 0}, pl / (gas.gamma - 1.0)};
  EulerState r{1.7, {0, 0, 0}, pr / (gas.gamma - 1.0)};
  const double ps = wb_hllc_flux(l, r, pl, pr, {0, 1, 0}, gas, 2, f);
  CHECK(ps == doctest::Approx(0.5 * (pl + pr)).epsilon(1e-15));
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f[2] == doctest::Approx(ps).epsilon(1e-14));
  CHECK(f[3] == 0.0);

  // equal equilibrium traces reduce to the plain flux
  Primitive wl, wr;
  wl.rho = 1.0;
  wl.u = {0.3, 0.1, 0};
  wl.p = 1.0;
  wr.rho = 1.2;
  wr.u = {-0.2, 0.4, 0};
  wr.p = 0.9;
  auto a = prim_to_cons(wl, gas, 2), b = prim_to_cons(wr, gas, 2);
  double g1[5], g2[5];
  wb_hllc_flux(a, b, 0.77, 0.77, {1, 0, 0}, gas, 2, g1);
  hllc_flux(a, b, {1, 0, 0}, gas, 2, g2);
  for (int c = 0; c < 4; ++c) CHECK(g1[c] == doctest::Approx(g2[c]).epsilon(1e-14));

  // continuity probe: small input perturbations move the flux a little
  double g3[5];
  auto bp = b;
  bp.rho += 1e-8;
  bp.E += 1e-8;
  wb_hllc_flux(a, bp, 0.77, 0.77, {1, 0, 0}, gas, 2, g3);
  for (int c = 0; c < 4; ++c) CHECK(std::abs(g3[c] - g1[c]) < 1e-6);
}
