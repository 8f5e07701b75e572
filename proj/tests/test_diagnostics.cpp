#include <cmath>
#include <fstream>

#include "doctest.h"
#include "sgdg/config.hpp"
#include "sgdg/diagnostics.hpp"
#include "sgdg/errors.hpp"
#include "sgdg/outputs.hpp"
#include "sgdg/scenarios.hpp"

using namespace sgdg;

TEST_CASE("error norms against samplers") {
  auto mesh = build_mesh(2, {0, 0, 0}, {1, 1, 1}, {8, 8, 1}, BoundaryTag::Transmissive);
  auto basis = BasisSet::create(2, 2, BasisTrunc::TotalDegree, mesh.h);
  auto f = l2_project(mesh, basis, 1, [](const std::array<double, 3>& x, double* v) {
    v[0] = std::sin(2 * x[0] + x[1]);
  });
  // field vs its own nodal values
  auto self = error_norms(f, [&](const std::array<double, 3>& x, double* v) {
    // nearest-element evaluation via the projection identity is awkward;
    // compare against the analytic sampler shifted by a known constant
    v[0] = std::sin(2 * x[0] + x[1]);
  }, {"u"});
  // projection error of a smooth function at k=2 on 8x8 is ~1e-4
  CHECK(self.l1[0] < 2e-4);
  CHECK(self.l1[0] <= std::sqrt(1.0) * self.l2[0] + 1e-15);
  CHECK(self.l2[0] <= 1.0 * self.linf[0] + 1e-15);

  auto off = error_norms(f, [&](const std::array<double, 3>& x, double* v) {
    v[0] = std::sin(2 * x[0] + x[1]) + 0.25;
  }, {"u"});
  CHECK(off.l1[0] == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(off.l2[0] == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(off.linf[0] == doctest::Approx(0.25).epsilon(1e-3));

  // L2 against a dense trapezoid oracle: project sin, compare norms
  double oracle = 0.0;
  {
    const int nfine = 400;
    const double hfine = 1.0 / nfine;
    for (int i = 0; i <= nfine; ++i)
      for (int j = 0; j <= nfine; ++j) {
        const double wx = (i == 0 || i == nfine) ? 0.5 : 1.0;
        const double wy = (j == 0 || j == nfine) ? 0.5 : 1.0;
        std::array<double, 3> x{i * hfine, j * hfine, 0};
        // evaluate the projected field
        int ei = std::min((int)(x[0] * 8), 7), ej = std::min((int)(x[1] * 8), 7);
        std::array<double, 3> xi{(x[0] - ei / 8.0) * 16 - 1, (x[1] - ej / 8.0) * 16 - 1, 0};
        const double d = f.eval_ref_point(mesh.index(ei, ej, 0), 0, xi) - std::sin(2 * x[0] + x[1]);
        oracle += wx * wy * hfine * hfine * d * d;
      }
    oracle = std::sqrt(oracle);
  }
  CHECK(self.l2[0] == doctest::Approx(oracle).epsilon(0.05));
}

TEST_CASE("convergence orders") {
  CHECK(convergence_order(4e-4, 1e-4) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(convergence_order(2.39e-05, 2.81e-06) == doctest::Approx(3.09).epsilon(1e-2));
  CHECK(convergence_order(1e-3, 1e-3) == doctest::Approx(0.0));
  CHECK(std::isinf(convergence_order(1e-3, 0.0)));
}

TEST_CASE("radial symmetry deviation") {
  auto mesh = build_mesh(2, {-0.5, -0.5, 0}, {0.5, 0.5, 1}, {20, 20, 1}, BoundaryTag::Transmissive);
  auto basis = BasisSet::create(2, 2, BasisTrunc::TotalDegree, mesh.h);
  // radial analytic field: deviation at projection-error scale
  auto fr = l2_project(mesh, basis, 1, [](const std::array<double, 3>& x, double* v) {
    v[0] = std::exp(-4.0 * (x[0] * x[0] + x[1] * x[1]));
  });
  CHECK(radial_symmetry_deviation(fr, 0, {0, 0, 0}) < 2e-3);

  // f = x: each bin spreads by about twice its radius
  auto fx = l2_project(mesh, basis, 1,
                       [](const std::array<double, 3>& x, double* v) { v[0] = x[0]; });
  const double dev = radial_symmetry_deviation(fx, 0, {0, 0, 0});
  // tie classes contain mirrored cells: spread ~ 2 * radius for f = x
  CHECK(dev > 0.8);
  CHECK(dev < 1.45);
}

TEST_CASE("config parsing, defaults, and round trip") {
  auto c = parse_config("scenario = wb2d\n");
  CHECK(c.kappa == 1.0);
  CHECK(c.G == 1.0);
  CHECK(c.lambda == 1.0);
  CHECK(c.n == 1);
  CHECK(c.gamma == 2.0);
  CHECK(c.t_end == 5.0);
  CHECK(c.meshes == std::vector<int>{10, 20, 40});

  auto j = parse_config("[jeans]\ng = 6.674\nmesh = 64\n# comment\noe = off\n");
  CHECK(j.gamma == doctest::Approx(5.0 / 3.0));
  CHECK(j.G == 6.674);
  CHECK(j.mu == 1e-3);
  CHECK(!j.oe);

  CHECK_THROWS_AS(parse_config("scenario = wb2d\ncfl = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = nosuch\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = wb2d\nwhatever = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = wb2d\nt_end = banana\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("mesh = 4\n"), ConfigError);

  // manifest round trip
  auto full = parse_config("scenario = blast2d\nmesh = 48\ncfl = 0.05\nthreads = 2\nd2 = naive\n");
  auto again = parse_config(config_to_text(full));
  CHECK(again == full);
}

TEST_CASE("csv writers") {
  EnergyHistory h;
  write_energy_csv(h, "/tmp/sgdg_test_energy.csv");
  {
    std::ifstream f("/tmp/sgdg_test_energy.csv");
    std::string line;
    std::getline(f, line);
    CHECK(line == "t,E_tot,E_kin,E_int,E_grav,rho_dev_l2");
    CHECK(!std::getline(f, line));  // header only
  }
  std::vector<ErrorTableRow> rows(4);
  for (int i = 0; i < 4; ++i) {
    rows[i].variable = "rho";
    rows[i].mesh = 10 << i;
    rows[i].l1 = 1.0 / (i + 1);
    rows[i].has_order = i > 0;
  }
  write_error_csv(rows, "/tmp/sgdg_test_errors.csv");
  std::ifstream f("/tmp/sgdg_test_errors.csv");
  std::string line;
  std::getline(f, line);
  int count = 0;
  bool first_blank_order = false;
  while (std::getline(f, line)) {
    if (count == 0) {
      // orders blank on the first row: ",," pattern after L1
      first_blank_order = line.find(",,") != std::string::npos;
    }
    ++count;
  }
  CHECK(count == 4);
  CHECK(first_blank_order);
}

TEST_CASE("run outputs: vtk cells, manifest round trip, determinism") {
  ScenarioConfig cfg = scenario_defaults("wb2d");
  cfg.meshes = {4};
  cfg.t_end = 0.05;
  auto out = run_scenario(cfg);
  write_outputs(out, "/tmp/sgdg_out_test");

  // 4x4 mesh -> 16 cells with the full set of arrays
  std::ifstream vtk("/tmp/sgdg_out_test/fields.vtk");
  REQUIRE(vtk.good());
  std::string text((std::istreambuf_iterator<char>(vtk)), std::istreambuf_iterator<char>());
  CHECK(text.find("CELL_DATA 16") != std::string::npos);
  for (const char* name : {"rho", "mom_x", "mom_y", "E_tot", "phi", "p"})
    CHECK(text.find(std::string("SCALARS ") + name + " double") != std::string::npos);

  // the manifest reparses to the identical configuration
  std::ifstream mf("/tmp/sgdg_out_test/manifest.txt");
  std::string mtext((std::istreambuf_iterator<char>(mf)), std::istreambuf_iterator<char>());
  auto again = parse_config(mtext);
  CHECK(again == out.config);

  // single-thread reruns are bit-identical
  auto out2 = run_scenario(cfg);
  write_outputs(out2, "/tmp/sgdg_out_test2");
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  };
  CHECK(slurp("/tmp/sgdg_out_test/energy.csv") == slurp("/tmp/sgdg_out_test2/energy.csv"));
  CHECK(slurp("/tmp/sgdg_out_test/errors.csv") == slurp("/tmp/sgdg_out_test2/errors.csv"));
}
