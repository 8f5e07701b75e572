#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace sgdg {

enum class BoundaryTag { Periodic, Exact, Transmissive, Reflecting };

// One face of the mesh. The unit normal is +e_axis and points from `left`
// into `right`. On a boundary face the exterior side is -1 and `tag` tells
// how ghost data is built; periodic faces wrap and are interior-like.
struct Face {
  int axis = 0;
  int left = -1;
  int right = -1;
  bool boundary = false;
  BoundaryTag tag = BoundaryTag::Transmissive;
};

struct CartesianMesh {
  int dim = 2;
  std::array<double, 3> lo{}, hi{};
  std::array<int, 3> cells{1, 1, 1};
  std::array<double, 3> h{1.0, 1.0, 1.0};
  // [axis][side], side 0 = low, 1 = high
  std::array<std::array<BoundaryTag, 2>, 3> tags{};
  int n_elements = 0;
  std::vector<Face> faces;

  int index(int i, int j, int k) const { return i + cells[0] * (j + cells[1] * k); }
  std::array<int, 3> unpack(int e) const {
    std::array<int, 3> c{0, 0, 0};
    c[0] = e % cells[0];
    e /= cells[0];
    c[1] = e % cells[1];
    c[2] = e / cells[1];
    return c;
  }
  std::array<double, 3> center(int e) const {
    auto c = unpack(e);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = lo[a] + (c[a] + 0.5) * h[a];
    return x;
  }
  // reference coords xi in [-1,1]^dim -> physical point
  std::array<double, 3> to_physical(int e, const std::array<double, 3>& xi) const {
    auto c = unpack(e);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = lo[a] + (c[a] + 0.5 * (1.0 + xi[a])) * h[a];
    return x;
  }
  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= h[a];
    return v;
  }
  // max element diameter, sqrt(sum h_i^2); all elements share it
  double diameter() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += h[a] * h[a];
    return std::sqrt(s);
  }
  bool fully_periodic() const {
    for (int a = 0; a < dim; ++a)
      if (tags[a][0] != BoundaryTag::Periodic) return false;
    return true;
  }
  double domain_measure() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= hi[a] - lo[a];
    return v;
  }
};

CartesianMesh build_mesh(int dim, const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                         const std::array<int, 3>& cells,
                         const std::array<std::array<BoundaryTag, 2>, 3>& tags);

// convenience: same tag on every side
CartesianMesh build_mesh(int dim, const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                         const std::array<int, 3>& cells, BoundaryTag tag);

}  // namespace sgdg
