#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>

#include "sgdg/field.hpp"

namespace sgdg {

struct PenaltyParams {
  double c11 = 1.0;
  std::array<double, 3> c12{0.5, 0.5, 0.5};
};

enum class PoissonBC { DirichletLike, Periodic };
enum class D2Variant { SBP, Naive };

using SpatialFn = std::function<double(const std::array<double, 3>& x)>;

struct PoissonSolution {
  DGField phi;  // scalar
  DGField g;    // dim-vector, the discrete gradient
};

// one scalar per face quadrature node, in the face's canonical (+axis) direction
struct FaceNodeTable {
  std::vector<double> v;  // [face * nq_face + node]
};

// Interface traces of an LDG (phi, g) pair. ghat_n is in the canonical face
// direction; Dirichlet closures use `data` on boundary faces.
struct LdgTraces {
  std::vector<double> phi_hat;
  std::vector<double> ghat_n;
};
LdgTraces ldg_traces(const DGField& phi, const DGField& g, const PenaltyParams& pen,
                     const SpatialFn& data);

// Both LDG Poisson solvers behind one reusable operator: the saddle system is
// reduced to a Schur complement in phi which is factorized once per
// (mesh, basis, bc) and shared by every later solve. Two backends:
//  - assembled sparse Schur + LDLT (Dirichlet) / LU with a gauge row (periodic)
//  - per-axis spectral factorization for tensor bases with Dirichlet closure,
//    used where a 3D sparse factorization would not fit
class PoissonSystem {
 public:
  static PoissonSystem assemble(const CartesianMesh& mesh, const BasisSet& basis,
                                const PenaltyParams& pen, PoissonBC bc,
                                bool tensor_backend = false);

  // solve grad relation g = grad(phi) and div(g) = source, Dirichlet data for phi
  PoissonSolution solve_d1(const DGField& source, const SpatialFn& dirichlet = nullptr) const;

  // time-derivative potential: div(gdot) = -four_pi_G * div(momentum).
  // SBP form consumes the interface mass fluxes; Naive differentiates the modal
  // momentum directly.
  PoissonSolution solve_d2(const DGField& momentum, double four_pi_G, D2Variant variant,
                           const FaceNodeTable* mass_flux,
                           const SpatialFn& dirichlet = nullptr) const;

  PoissonBC bc() const { return bc_; }
  bool tensor_backend() const { return tensor_; }
  void set_threads(int n) { threads_ = n; }
  const BasisSet& solver_basis() const { return *basis_; }
  const CartesianMesh& mesh() const { return *mesh_; }

  // assembled-backend introspection (tests, debug dumps)
  const Eigen::SparseMatrix<double>& schur() const;
  Eigen::VectorXd apply_schur(const Eigen::VectorXd& x) const;
  double min_pivot() const;
  void dump_schur(std::ostream& os) const;

 private:
  PoissonSystem() = default;
  PoissonSolution solve_reduced(Eigen::VectorXd rhs, const DGField* data_g,
                                const SpatialFn& dirichlet) const;
  DGField dirichlet_g_data(const SpatialFn& dirichlet) const;
  Eigen::VectorXd apply_divergence_gpart(const DGField& g) const;
  DGField apply_gradient_form(const DGField& phi, const SpatialFn& dirichlet) const;

  const CartesianMesh* mesh_ = nullptr;
  const BasisSet* basis_ = nullptr;
  PenaltyParams pen_;
  PoissonBC bc_ = PoissonBC::DirichletLike;
  bool tensor_ = false;

  int threads_ = 1;
  Eigen::SparseMatrix<double> A_;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  int gauge_row_ = -1;

  // tensor backend: 1D spectral data per axis
  std::array<Eigen::MatrixXd, 3> evec_;
  std::array<Eigen::VectorXd, 3> eval_;
};

}  // namespace sgdg
