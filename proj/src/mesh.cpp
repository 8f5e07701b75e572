#include "sgdg/mesh.hpp"

#include "sgdg/errors.hpp"

namespace sgdg {

CartesianMesh build_mesh(int dim, const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                         const std::array<int, 3>& cells,
                         const std::array<std::array<BoundaryTag, 2>, 3>& tags) {
  if (dim < 1 || dim > 3) throw ConfigError("mesh dimension must be 1, 2 or 3");
  CartesianMesh m;
  m.dim = dim;
  m.lo = lo;
  m.hi = hi;
  m.cells = cells;
  m.tags = tags;
  m.n_elements = 1;
  for (int a = 0; a < dim; ++a) {
    if (cells[a] < 1) throw ConfigError("cell count must be >= 1 on every axis");
    if (!(hi[a] > lo[a])) throw ConfigError("domain bounds must be ordered lo < hi");
    const bool p0 = tags[a][0] == BoundaryTag::Periodic;
    const bool p1 = tags[a][1] == BoundaryTag::Periodic;
    if (p0 != p1) throw ConfigError("periodic tag must be set on both sides of an axis");
    m.h[a] = (hi[a] - lo[a]) / cells[a];
    m.n_elements *= cells[a];
  }
  for (int a = dim; a < 3; ++a) {
    m.cells[a] = 1;
    m.h[a] = 1.0;
    m.lo[a] = 0.0;
    m.hi[a] = 1.0;
  }

  // Faces with normal +e_axis, sweeping the planes of each axis. Periodic
  // axes have cells[a] unique planes (plane 0 wraps), others cells[a]+1.
  for (int a = 0; a < dim; ++a) {
    const bool periodic = tags[a][0] == BoundaryTag::Periodic;
    const int n_planes = periodic ? m.cells[a] : m.cells[a] + 1;
    const int t1 = (a + 1) % 3;
    const int t2 = (a + 2) % 3;
    for (int p = 0; p < n_planes; ++p) {
      for (int j2 = 0; j2 < m.cells[t2]; ++j2) {
        for (int j1 = 0; j1 < m.cells[t1]; ++j1) {
          Face f;
          f.axis = a;
          std::array<int, 3> cl{0, 0, 0}, cr{0, 0, 0};
          cl[t1] = cr[t1] = j1;
          cl[t2] = cr[t2] = j2;
          cl[a] = p - 1;
          cr[a] = p;
          if (periodic) {
            if (cl[a] < 0) cl[a] = m.cells[a] - 1;
            if (cr[a] >= m.cells[a]) cr[a] = 0;
            f.left = m.index(cl[0], cl[1], cl[2]);
            f.right = m.index(cr[0], cr[1], cr[2]);
            f.boundary = false;
          } else if (p == 0) {
            f.left = -1;
            f.right = m.index(cr[0], cr[1], cr[2]);
            f.boundary = true;
            f.tag = tags[a][0];
          } else if (p == m.cells[a]) {
            f.left = m.index(cl[0], cl[1], cl[2]);
            f.right = -1;
            f.boundary = true;
            f.tag = tags[a][1];
          } else {
            f.left = m.index(cl[0], cl[1], cl[2]);
            f.right = m.index(cr[0], cr[1], cr[2]);
            f.boundary = false;
          }
          m.faces.push_back(f);
        }
      }
    }
  }
  return m;
}

CartesianMesh build_mesh(int dim, const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                         const std::array<int, 3>& cells, BoundaryTag tag) {
  std::array<std::array<BoundaryTag, 2>, 3> tags;
  for (auto& t : tags) t = {tag, tag};
  return build_mesh(dim, lo, hi, cells, tags);
}

}  // namespace sgdg
