#include "sgdg/outputs.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sgdg/config.hpp"
#include "sgdg/errors.hpp"
#include "sgdg/version.hpp"

namespace sgdg {

namespace {

std::ofstream open_file(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw NumericalError("cannot open output file " + path);
  f.precision(17);
  return f;
}

void write_field_vtk(const RunOutputs& out, const std::string& path) {
  const CartesianMesh& mesh = *out.art.mesh;
  const int dim = mesh.dim;
  auto f = open_file(path);
  f << "# vtk DataFile Version 3.0\n";
  f << "sgdg fields\nASCII\nDATASET STRUCTURED_POINTS\n";
  f << "DIMENSIONS " << mesh.cells[0] + 1 << " " << mesh.cells[1] + 1 << " "
    << (dim == 3 ? mesh.cells[2] + 1 : 1) << "\n";
  f << "ORIGIN " << mesh.lo[0] << " " << mesh.lo[1] << " " << (dim == 3 ? mesh.lo[2] : 0.0) << "\n";
  f << "SPACING " << mesh.h[0] << " " << mesh.h[1] << " " << (dim == 3 ? mesh.h[2] : 1.0) << "\n";
  f << "CELL_DATA " << mesh.n_elements << "\n";

  auto scalar = [&](const std::string& name, const std::function<double(int)>& v) {
    f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < mesh.n_elements; ++e) f << v(e) << "\n";
  };
  scalar("rho", [&](int e) { return out.state.cell_average(e, 0); });
  scalar("mom_x", [&](int e) { return out.state.cell_average(e, 1); });
  scalar("mom_y", [&](int e) { return out.state.cell_average(e, 2); });
  if (dim == 3) scalar("mom_z", [&](int e) { return out.state.cell_average(e, 3); });
  scalar("E_tot", [&](int e) { return out.state.cell_average(e, dim + 1); });
  scalar("phi", [&](int e) { return out.phi.cell_average(e, 0); });
  scalar("p", [&](int e) { return out.cell_pressure.empty() ? 0.0 : out.cell_pressure[e]; });
}

void write_quadrature_vtk(const RunOutputs& out, const std::string& path) {
  const CartesianMesh& mesh = *out.art.mesh;
  const BasisSet& basis = *out.art.basis;
  const int dim = mesh.dim;
  const int k1 = basis.nq1;
  std::array<int, 3> np{mesh.cells[0] * k1, mesh.cells[1] * k1, dim == 3 ? mesh.cells[2] * k1 : 1};
  auto f = open_file(path);
  f << "# vtk DataFile Version 3.0\n";
  f << "sgdg quadrature-resolved fields\nASCII\nDATASET STRUCTURED_GRID\n";
  f << "DIMENSIONS " << np[0] << " " << np[1] << " " << np[2] << "\n";
  const long total = (long)np[0] * np[1] * np[2];
  f << "POINTS " << total << " double\n";
  // map a structured (i,j,l) point to (element, local node)
  auto locate = [&](int i, int) {
    const int e = i / k1, q = i % k1;
    return std::pair<int, int>(e, q);
  };
  std::vector<int> elem(total), node(total);
  long idx = 0;
  for (int l = 0; l < np[2]; ++l)
    for (int j = 0; j < np[1]; ++j)
      for (int i = 0; i < np[0]; ++i) {
        auto [ex, qx] = locate(i, 0);
        auto [ey, qy] = locate(j, 1);
        auto [ez, qz] = dim == 3 ? locate(l, 2) : std::pair<int, int>(0, 0);
        const int e = mesh.index(ex, ey, ez);
        // tensor node index consistent with the basis tables (x fastest)
        const int q = qx + k1 * (qy + (dim == 3 ? k1 * qz : 0));
        elem[idx] = e;
        node[idx] = q;
        const auto x = mesh.to_physical(e, basis.vol_ref[q]);
        f << x[0] << " " << x[1] << " " << (dim == 3 ? x[2] : 0.0) << "\n";
        ++idx;
      }
  f << "POINT_DATA " << total << "\n";
  auto scalar = [&](const std::string& name, int comp, const DGField& field) {
    f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (long i = 0; i < total; ++i) f << field.eval_volume_node(elem[i], comp, node[i]) << "\n";
  };
  scalar("rho", 0, out.state);
  scalar("mom_x", 1, out.state);
  scalar("mom_y", 2, out.state);
  if (dim == 3) scalar("mom_z", 3, out.state);
  scalar("E_tot", dim + 1, out.state);
  scalar("phi", 0, out.phi);
}

}  // namespace

void write_error_csv(const std::vector<ErrorTableRow>& rows, const std::string& path) {
  auto f = open_file(path);
  f << "variable,mesh,L1,L1_order,L2,L2_order,Linf,Linf_order\n";
  for (const auto& r : rows) {
    f << r.variable << "," << r.mesh << "," << r.l1 << ",";
    if (r.has_order) f << r.l1_order;
    f << "," << r.l2 << ",";
    if (r.has_order) f << r.l2_order;
    f << "," << r.linf << ",";
    if (r.has_order) f << r.linf_order;
    f << "\n";
  }
}

void write_energy_csv(const EnergyHistory& hist, const std::string& path) {
  auto f = open_file(path);
  f << "t,E_tot,E_kin,E_int,E_grav,rho_dev_l2\n";
  for (const auto& s : hist.samples)
    f << s.t << "," << s.total << "," << s.kinetic << "," << s.internal << ","
      << s.gravitational << "," << s.rho_dev_l2 << "\n";
}

void write_outputs(const RunOutputs& out, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw NumericalError("cannot create output directory " + dir + ": " + ec.message());

  write_error_csv(out.errors, dir + "/errors.csv");
  write_energy_csv(out.energy, dir + "/energy.csv");
  if (out.art.mesh && out.state.mesh) {
    write_field_vtk(out, dir + "/fields.vtk");
    write_quadrature_vtk(out, dir + "/fields_quadrature.vtk");
  }
  auto f = open_file(dir + "/manifest.txt");
  f << "# sgdg run manifest (reparseable configuration)\n";
  f << "# revision: " << kVersion << "\n";
  f << "# steps: " << out.steps << "\n";
  f << "# wall_seconds: " << out.wall_seconds << "\n";
  f << "# energy_drift: " << out.energy_drift << "\n";
  f << "# invalid_states: " << out.invalid_states << "\n";
  f << "# limited_cells: " << out.limited_cells << "\n";
  if (out.radial_deviation >= 0.0) f << "# radial_deviation: " << out.radial_deviation << "\n";
  f << config_to_text(out.config);
}

}  // namespace sgdg
