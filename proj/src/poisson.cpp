#include "sgdg/poisson.hpp"

#include <cmath>
#include <ostream>
#include <vector>

#include "sgdg/errors.hpp"
#include "sgdg/parallel.hpp"

namespace sgdg {

namespace {

// physical face-node coordinates, taken from an interior element of the face
std::array<double, 3> face_node_point(const CartesianMesh& mesh, const BasisSet& basis,
                                      const Face& f, int node) {
  if (f.left >= 0) return mesh.to_physical(f.left, basis.face_ref[(size_t)basis.slot(f.axis, 1) * basis.nq_face + node]);
  return mesh.to_physical(f.right, basis.face_ref[(size_t)basis.slot(f.axis, 0) * basis.nq_face + node]);
}

struct RefMats {
  // W[a](i,j) = int_K B_j dB_i/dx_a
  std::array<Eigen::MatrixXd, 3> W;
  // FF[a][si][sj](i,j) = sum_mu w_mu B_i(axis a, side si, mu) B_j(axis a, side sj, mu)
  std::array<std::array<std::array<Eigen::MatrixXd, 2>, 2>, 3> FF;
};

RefMats build_ref_mats(const BasisSet& b) {
  RefMats r;
  const int nm = b.n_modes;
  for (int a = 0; a < b.dim; ++a) {
    r.W[a] = Eigen::MatrixXd::Zero(nm, nm);
    for (int q = 0; q < b.nq_vol; ++q) {
      const double wj = b.vol_w[q] * b.jac;
      const double* val = b.vol_value_row(q);
      for (int i = 0; i < nm; ++i) {
        const double gi = b.vol_grad[((size_t)q * nm + i) * 3 + a];
        for (int j = 0; j < nm; ++j) r.W[a](i, j) += wj * val[j] * gi;
      }
    }
    for (int si = 0; si < 2; ++si)
      for (int sj = 0; sj < 2; ++sj) {
        r.FF[a][si][sj] = Eigen::MatrixXd::Zero(nm, nm);
        for (int mu = 0; mu < b.nq_face; ++mu) {
          const double w = b.face_w[mu];
          const double* vi = b.face_value_row(a, si, mu);
          const double* vj = b.face_value_row(a, sj, mu);
          for (int i = 0; i < nm; ++i)
            for (int j = 0; j < nm; ++j) r.FF[a][si][sj](i, j) += w * vi[i] * vj[j];
        }
      }
  }
  return r;
}

}  // namespace

LdgTraces ldg_traces(const DGField& phi, const DGField& g, const PenaltyParams& pen,
                     const SpatialFn& data) {
  const CartesianMesh& mesh = *phi.mesh;
  const BasisSet& b = *phi.basis;
  const int nfq = b.nq_face;
  LdgTraces tr;
  tr.phi_hat.assign((size_t)mesh.faces.size() * nfq, 0.0);
  tr.ghat_n.assign((size_t)mesh.faces.size() * nfq, 0.0);
  for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    const int a = f.axis;
    const double cL = 0.5 + pen.c12[a], cR = 0.5 - pen.c12[a];
    const double dL = 0.5 - pen.c12[a], dR = 0.5 + pen.c12[a];
    for (int mu = 0; mu < nfq; ++mu) {
      double ph = 0.0, gn = 0.0;
      if (!f.boundary) {
        const double pl = phi.eval_face_node(f.left, 0, a, 1, mu);
        const double pr = phi.eval_face_node(f.right, 0, a, 0, mu);
        const double gl = g.eval_face_node(f.left, a, a, 1, mu);
        const double gr = g.eval_face_node(f.right, a, a, 0, mu);
        ph = cL * pl + cR * pr;
        gn = dL * gl + dR * gr - pen.c11 * (pl - pr);
      } else {
        const double phid = data ? data(face_node_point(mesh, b, f, mu)) : 0.0;
        if (f.right < 0) {  // interior on the left, outward = +n
          const double pl = phi.eval_face_node(f.left, 0, a, 1, mu);
          const double gl = g.eval_face_node(f.left, a, a, 1, mu);
          ph = phid;
          gn = gl - pen.c11 * (pl - phid);
        } else {  // interior on the right, outward = -n
          const double pr = phi.eval_face_node(f.right, 0, a, 0, mu);
          const double gr = g.eval_face_node(f.right, a, a, 0, mu);
          ph = phid;
          // ghat . n_out = -g_a - c11 (phi - data); stored in +n direction
          gn = gr + pen.c11 * (pr - phid);
        }
      }
      tr.phi_hat[fi * nfq + mu] = ph;
      tr.ghat_n[fi * nfq + mu] = gn;
    }
  }
  return tr;
}

DGField PoissonSystem::dirichlet_g_data(const SpatialFn& dirichlet) const {
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& b = *basis_;
  DGField out(mesh, b, b.dim, FieldRole::Auxiliary);
  if (bc_ == PoissonBC::Periodic || !dirichlet) return out;
  for (const Face& f : mesh.faces) {
    if (!f.boundary) continue;
    const int a = f.axis;
    const double fj = b.face_jac[a];
    const int e = f.right < 0 ? f.left : f.right;
    const int side = f.right < 0 ? 1 : 0;
    const double sgn = f.right < 0 ? 1.0 : -1.0;  // outward normal component
    for (int mu = 0; mu < b.nq_face; ++mu) {
      const double phid = dirichlet(face_node_point(mesh, b, f, mu));
      const double wphi = sgn * fj * b.face_w[mu] * phid;
      const double* bv = b.face_value_row(a, side, mu);
      double* cm = out.modes(e, a);
      for (int i = 0; i < b.n_modes; ++i) cm[i] += wphi * bv[i];
    }
  }
  return out;
}

Eigen::VectorXd PoissonSystem::apply_divergence_gpart(const DGField& g) const {
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& b = *basis_;
  const int nm = b.n_modes;
  Eigen::VectorXd out = Eigen::VectorXd::Zero((Eigen::Index)mesh.n_elements * nm);
  // volume: sum_q wJ g . grad(B_i)
  parallel_for(mesh.n_elements, threads_, [&](int e) {
    for (int q = 0; q < b.nq_vol; ++q) {
      const double wj = b.vol_w[q] * b.jac;
      for (int a = 0; a < b.dim; ++a) {
        const double ga = g.eval_volume_node(e, a, q);
        for (int i = 0; i < nm; ++i)
          out[(Eigen::Index)e * nm + i] += wj * ga * b.vol_grad[((size_t)q * nm + i) * 3 + a];
      }
    }
  });
  // faces: -sum int B_i (g-part of ghat) . n_{E,K}
  for (const Face& f : mesh.faces) {
    const int a = f.axis;
    const double fj = b.face_jac[a];
    const double dL = 0.5 - pen_.c12[a], dR = 0.5 + pen_.c12[a];
    for (int mu = 0; mu < b.nq_face; ++mu) {
      const double w = fj * b.face_w[mu];
      double gn = 0.0;
      if (!f.boundary) {
        gn = dL * g.eval_face_node(f.left, a, a, 1, mu) + dR * g.eval_face_node(f.right, a, a, 0, mu);
      } else if (f.right < 0) {
        gn = g.eval_face_node(f.left, a, a, 1, mu);
      } else {
        gn = g.eval_face_node(f.right, a, a, 0, mu);  // ghat.n_out = -g_a; stored +n
      }
      if (f.left >= 0) {
        const double* bv = b.face_value_row(a, 1, mu);
        for (int i = 0; i < nm; ++i) out[(Eigen::Index)f.left * nm + i] -= w * gn * bv[i];
      }
      if (f.right >= 0) {
        const double* bv = b.face_value_row(a, 0, mu);
        for (int i = 0; i < nm; ++i) out[(Eigen::Index)f.right * nm + i] += w * gn * bv[i];
      }
    }
  }
  return out;
}

DGField PoissonSystem::apply_gradient_form(const DGField& phi, const SpatialFn& dirichlet) const {
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& b = *basis_;
  const int nm = b.n_modes;
  DGField g(mesh, b, b.dim, FieldRole::Gradient);
  // volume: -int phi dB_i/dx_a
  parallel_for(mesh.n_elements, threads_, [&](int e) {
    for (int q = 0; q < b.nq_vol; ++q) {
      const double wj = b.vol_w[q] * b.jac;
      const double ph = phi.eval_volume_node(e, 0, q);
      for (int a = 0; a < b.dim; ++a) {
        double* cm = g.modes(e, a);
        for (int i = 0; i < nm; ++i) cm[i] -= wj * ph * b.vol_grad[((size_t)q * nm + i) * 3 + a];
      }
    }
  });
  // faces: + int phihat B_i n_{E,K,a}
  for (const Face& f : mesh.faces) {
    const int a = f.axis;
    const double fj = b.face_jac[a];
    const double cL = 0.5 + pen_.c12[a], cR = 0.5 - pen_.c12[a];
    for (int mu = 0; mu < b.nq_face; ++mu) {
      const double w = fj * b.face_w[mu];
      double ph = 0.0;
      if (!f.boundary) {
        ph = cL * phi.eval_face_node(f.left, 0, a, 1, mu) +
             cR * phi.eval_face_node(f.right, 0, a, 0, mu);
      } else {
        ph = dirichlet ? dirichlet(face_node_point(mesh, b, f, mu)) : 0.0;
      }
      if (f.left >= 0) {
        const double* bv = b.face_value_row(a, 1, mu);
        double* cm = g.modes(f.left, a);
        for (int i = 0; i < nm; ++i) cm[i] += w * ph * bv[i];
      }
      if (f.right >= 0) {
        const double* bv = b.face_value_row(a, 0, mu);
        double* cm = g.modes(f.right, a);
        for (int i = 0; i < nm; ++i) cm[i] -= w * ph * bv[i];
      }
    }
  }
  return g;
}

PoissonSystem PoissonSystem::assemble(const CartesianMesh& mesh, const BasisSet& basis,
                                      const PenaltyParams& pen, PoissonBC bc,
                                      bool tensor_backend) {
  PoissonSystem sys;
  sys.mesh_ = &mesh;
  sys.basis_ = &basis;
  sys.pen_ = pen;
  sys.bc_ = bc;

  if (bc == PoissonBC::Periodic && !mesh.fully_periodic())
    throw ConfigError("periodic Poisson operator on a non-periodic mesh");
  if (bc == PoissonBC::DirichletLike && mesh.fully_periodic())
    throw ConfigError("Dirichlet Poisson operator on a fully periodic mesh");

  if (tensor_backend) {
    if (bc != PoissonBC::DirichletLike)
      throw ConfigError("tensor Poisson backend requires the Dirichlet closure");
    if (basis.trunc != BasisTrunc::Tensor)
      throw ConfigError("tensor Poisson backend requires a tensor basis");
    sys.tensor_ = true;
    for (int a = 0; a < mesh.dim; ++a) {
      // the d-dimensional Schur operator is the Kronecker sum of per-axis 1D
      // operators; factor each axis spectrally
      std::array<double, 3> lo1{mesh.lo[a], 0.0, 0.0}, hi1{mesh.hi[a], 1.0, 1.0};
      std::array<int, 3> cells1{mesh.cells[a], 1, 1};
      CartesianMesh m1 = build_mesh(1, lo1, hi1, cells1, BoundaryTag::Exact);
      BasisSet b1 = BasisSet::create(1, basis.degree, BasisTrunc::Tensor, {mesh.h[a], 1.0, 1.0});
      PenaltyParams pen1 = pen;
      pen1.c12 = {pen.c12[a], 0.0, 0.0};
      PoissonSystem s1 = PoissonSystem::assemble(m1, b1, pen1, PoissonBC::DirichletLike, false);
      Eigen::MatrixXd a1 = Eigen::MatrixXd(s1.A_);
      if ((a1 - a1.transpose()).norm() > 1e-10 * a1.norm())
        throw NumericalError("1D Schur operator unexpectedly nonsymmetric");
      a1 = 0.5 * (a1 + a1.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a1);
      if (eig.info() != Eigen::Success) throw NumericalError("1D spectral factorization failed");
      if (eig.eigenvalues().minCoeff() <= 0.0)
        throw NumericalError("1D Schur operator not positive definite");
      sys.evec_[a] = eig.eigenvectors();
      sys.eval_[a] = eig.eigenvalues();
    }
    return sys;
  }

  const int nm = basis.n_modes;
  const int E = mesh.n_elements;
  const RefMats rm = build_ref_mats(basis);
  auto gidx = [&](int a, int e, int i) { return ((Eigen::Index)a * E + e) * nm + i; };
  auto pidx = [&](int e, int i) { return (Eigen::Index)e * nm + i; };

  std::vector<Eigen::Triplet<double>> tg, td, tp;
  // volume parts
  for (int e = 0; e < E; ++e)
    for (int a = 0; a < mesh.dim; ++a)
      for (int i = 0; i < nm; ++i)
        for (int j = 0; j < nm; ++j) {
          const double w = rm.W[a](i, j);
          if (w != 0.0) {
            tg.emplace_back(gidx(a, e, i), pidx(e, j), -w);
            td.emplace_back(pidx(e, i), gidx(a, e, j), w);
          }
        }
  // face parts
  for (const Face& f : mesh.faces) {
    const int a = f.axis;
    const double fj = basis.face_jac[a];
    const double cL = 0.5 + pen.c12[a], cR = 0.5 - pen.c12[a];
    const double dL = 0.5 - pen.c12[a], dR = 0.5 + pen.c12[a];
    if (!f.boundary) {
      const int L = f.left, R = f.right;
      for (int i = 0; i < nm; ++i)
        for (int j = 0; j < nm; ++j) {
          const double f11 = fj * rm.FF[a][1][1](i, j);
          const double f10 = fj * rm.FF[a][1][0](i, j);
          const double f01 = fj * rm.FF[a][0][1](i, j);
          const double f00 = fj * rm.FF[a][0][0](i, j);
          // gradient equation: + int phihat B_i n_{E,K,a}
          if (cL != 0.0) tg.emplace_back(gidx(a, L, i), pidx(L, j), cL * f11);
          if (cR != 0.0) tg.emplace_back(gidx(a, L, i), pidx(R, j), cR * f10);
          if (cL != 0.0) tg.emplace_back(gidx(a, R, i), pidx(L, j), -cL * f01);
          if (cR != 0.0) tg.emplace_back(gidx(a, R, i), pidx(R, j), -cR * f00);
          // divergence equation g-part: - int B_i (dL gL + dR gR)
          if (dL != 0.0) td.emplace_back(pidx(L, i), gidx(a, L, j), -dL * f11);
          if (dR != 0.0) td.emplace_back(pidx(L, i), gidx(a, R, j), -dR * f10);
          if (dL != 0.0) td.emplace_back(pidx(R, i), gidx(a, L, j), dL * f01);
          if (dR != 0.0) td.emplace_back(pidx(R, i), gidx(a, R, j), dR * f00);
          // penalty part: ghat has -c11 (phiL - phiR)
          tp.emplace_back(pidx(L, i), pidx(L, j), pen.c11 * f11);
          tp.emplace_back(pidx(L, i), pidx(R, j), -pen.c11 * f10);
          tp.emplace_back(pidx(R, i), pidx(L, j), -pen.c11 * f01);
          tp.emplace_back(pidx(R, i), pidx(R, j), pen.c11 * f00);
        }
    } else {
      const bool left_in = f.right < 0;
      const int e = left_in ? f.left : f.right;
      const int s = left_in ? 1 : 0;
      const double gsgn = left_in ? -1.0 : 1.0;  // -int B_i g.n_out, n_out = +-e_a
      for (int i = 0; i < nm; ++i)
        for (int j = 0; j < nm; ++j) {
          const double ff = fj * rm.FF[a][s][s](i, j);
          td.emplace_back(pidx(e, i), gidx(a, e, j), gsgn * ff);
          // penalty: ghat.n_out has -c11 phi^int
          tp.emplace_back(pidx(e, i), pidx(e, j), pen.c11 * ff);
        }
    }
  }

  Eigen::SparseMatrix<double> G((Eigen::Index)mesh.dim * E * nm, (Eigen::Index)E * nm);
  Eigen::SparseMatrix<double> D((Eigen::Index)E * nm, (Eigen::Index)mesh.dim * E * nm);
  Eigen::SparseMatrix<double> P((Eigen::Index)E * nm, (Eigen::Index)E * nm);
  G.setFromTriplets(tg.begin(), tg.end());
  D.setFromTriplets(td.begin(), td.end());
  P.setFromTriplets(tp.begin(), tp.end());
  sys.A_ = (D * G + P).pruned();

  if (bc == PoissonBC::DirichletLike) {
    sys.ldlt_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    sys.ldlt_->compute(sys.A_);
    if (sys.ldlt_->info() != Eigen::Success)
      throw NumericalError("Poisson Schur factorization failed (indefinite assembly?)");
    if (sys.ldlt_->vectorD().minCoeff() <= 0.0)
      throw NumericalError("Poisson Schur complement has nonpositive pivots");
  } else {
    // replace one mode-0 row with the mean gauge, then LU
    sys.gauge_row_ = 0;
    std::vector<Eigen::Triplet<double>> tm;
    for (int col = 0; col < sys.A_.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A_, col); it; ++it)
        if (it.row() != sys.gauge_row_) tm.emplace_back(it.row(), it.col(), it.value());
    for (int e = 0; e < E; ++e)
      tm.emplace_back(sys.gauge_row_, pidx(e, 0), basis.sqrt_cellvol);
    Eigen::SparseMatrix<double> Am((Eigen::Index)E * nm, (Eigen::Index)E * nm);
    Am.setFromTriplets(tm.begin(), tm.end());
    sys.lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    sys.lu_->compute(Am);
    if (sys.lu_->info() != Eigen::Success)
      throw NumericalError("periodic Poisson LU factorization failed");
  }
  return sys;
}

PoissonSolution PoissonSystem::solve_reduced(Eigen::VectorXd rhs, const DGField* data_g,
                                             const SpatialFn& dirichlet) const {
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& b = *basis_;
  const int nm = b.n_modes;
  if (data_g) rhs -= apply_divergence_gpart(*data_g);

  Eigen::VectorXd x;
  if (tensor_) {
    const int k1 = b.nq1;
    std::array<int, 3> n1{1, 1, 1};
    for (int a = 0; a < mesh.dim; ++a) n1[a] = mesh.cells[a] * k1;
    const Eigen::Index N = (Eigen::Index)mesh.n_elements * nm;
    Eigen::VectorXd t(N);
    std::vector<Eigen::Index> perm(N);
    for (int e = 0; e < mesh.n_elements; ++e) {
      const auto ec = mesh.unpack(e);
      for (int m = 0; m < nm; ++m) {
        const auto& al = b.alpha[m];
        Eigen::Index ix = (Eigen::Index)ec[0] * k1 + al[0];
        Eigen::Index iy = mesh.dim > 1 ? (Eigen::Index)ec[1] * k1 + al[1] : 0;
        Eigen::Index iz = mesh.dim > 2 ? (Eigen::Index)ec[2] * k1 + al[2] : 0;
        perm[(Eigen::Index)e * nm + m] = ix + n1[0] * (iy + (Eigen::Index)n1[1] * iz);
      }
    }
    for (Eigen::Index i = 0; i < N; ++i) t[perm[i]] = rhs[i];
    auto fwd = [&](int axis, bool transpose) {
      const Eigen::MatrixXd& V = evec_[axis];
      if (axis == 0) {
        Eigen::Map<Eigen::MatrixXd> M(t.data(), n1[0], N / n1[0]);
        M = transpose ? (V.transpose() * M).eval() : (V * M).eval();
      } else if (axis == 1) {
        for (Eigen::Index z = 0; z < n1[2]; ++z) {
          Eigen::Map<Eigen::MatrixXd> S(t.data() + z * n1[0] * n1[1], n1[0], n1[1]);
          S = transpose ? (S * V).eval() : (S * V.transpose()).eval();
        }
      } else {
        Eigen::Map<Eigen::MatrixXd> M(t.data(), (Eigen::Index)n1[0] * n1[1], n1[2]);
        M = transpose ? (M * V).eval() : (M * V.transpose()).eval();
      }
    };
    for (int a = 0; a < mesh.dim; ++a) fwd(a, true);
    for (Eigen::Index z = 0; z < n1[2]; ++z)
      for (Eigen::Index y = 0; y < n1[1]; ++y)
        for (Eigen::Index xx = 0; xx < n1[0]; ++xx) {
          double lam = eval_[0][xx];
          if (mesh.dim > 1) lam += eval_[1][y];
          if (mesh.dim > 2) lam += eval_[2][z];
          t[xx + n1[0] * (y + (Eigen::Index)n1[1] * z)] /= lam;
        }
    for (int a = 0; a < mesh.dim; ++a) fwd(a, false);
    x.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) x[i] = t[perm[i]];
  } else if (bc_ == PoissonBC::DirichletLike) {
    x = ldlt_->solve(rhs);
    if (ldlt_->info() != Eigen::Success) throw NumericalError("Poisson solve failed");
  } else {
    // compatibility projection (mean-zero source) and gauge
    double zr = 0.0;
    for (int e = 0; e < mesh.n_elements; ++e) zr += rhs[(Eigen::Index)e * nm] * b.sqrt_cellvol;
    const double corr = zr / mesh.domain_measure();
    for (int e = 0; e < mesh.n_elements; ++e) rhs[(Eigen::Index)e * nm] -= corr * b.sqrt_cellvol;
    rhs[gauge_row_] = 0.0;
    x = lu_->solve(rhs);
    if (lu_->info() != Eigen::Success) throw NumericalError("periodic Poisson solve failed");
    double mean = 0.0;
    for (int e = 0; e < mesh.n_elements; ++e) mean += x[(Eigen::Index)e * nm] * b.sqrt_cellvol;
    mean /= mesh.domain_measure();
    for (int e = 0; e < mesh.n_elements; ++e) x[(Eigen::Index)e * nm] -= mean * b.sqrt_cellvol;
  }

  PoissonSolution sol;
  sol.phi = DGField(mesh, b, 1, FieldRole::Potential);
  for (int e = 0; e < mesh.n_elements; ++e)
    for (int m = 0; m < nm; ++m) sol.phi.c(e, 0, m) = x[(Eigen::Index)e * nm + m];
  sol.g = apply_gradient_form(sol.phi, bc_ == PoissonBC::DirichletLike ? dirichlet : nullptr);
  return sol;
}

PoissonSolution PoissonSystem::solve_d1(const DGField& source, const SpatialFn& dirichlet) const {
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& b = *basis_;
  const int nm = b.n_modes;
  for (double v : source.coeff)
    if (!std::isfinite(v)) throw NumericalError("non-finite Poisson source");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero((Eigen::Index)mesh.n_elements * nm);
  // rhs(i) = fvec = -int S B_i ... entering as A phi = fvec - b2 - D b1 with
  // the sign convention A ~ -Laplacian, so accumulate +int S B_i and negate.
  parallel_for(mesh.n_elements, threads_, [&](int e) {
    for (int q = 0; q < b.nq_vol; ++q) {
      const double s = source.eval_volume_node(e, 0, q);
      const double wj = b.vol_w[q] * b.jac * s;
      const double* bv = b.vol_value_row(q);
      for (int i = 0; i < nm; ++i) rhs[(Eigen::Index)e * nm + i] -= wj * bv[i];
    }
  });
  // Dirichlet data contributions to the divergence equation (b2)
  if (bc_ == PoissonBC::DirichletLike && dirichlet) {
    for (const Face& f : mesh.faces) {
      if (!f.boundary) continue;
      const int a = f.axis;
      const int e = f.right < 0 ? f.left : f.right;
      const int s = f.right < 0 ? 1 : 0;
      for (int mu = 0; mu < b.nq_face; ++mu) {
        const double phid = dirichlet(face_node_point(mesh, b, f, mu));
        const double w = b.face_jac[a] * b.face_w[mu] * pen_.c11 * phid;
        const double* bv = b.face_value_row(a, s, mu);
        // b2 = -c11 int B_i data; rhs -= b2
        for (int i = 0; i < nm; ++i) rhs[(Eigen::Index)e * nm + i] += w * bv[i];
      }
    }
  }
  if (bc_ == PoissonBC::DirichletLike && dirichlet) {
    DGField data_g = dirichlet_g_data(dirichlet);
    return solve_reduced(std::move(rhs), &data_g, dirichlet);
  }
  return solve_reduced(std::move(rhs), nullptr, dirichlet);
}

PoissonSolution PoissonSystem::solve_d2(const DGField& momentum, double four_pi_G,
                                        D2Variant variant, const FaceNodeTable* mass_flux,
                                        const SpatialFn& dirichlet) const {
  const CartesianMesh& mesh = *mesh_;
  const BasisSet& b = *basis_;
  const int nm = b.n_modes;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero((Eigen::Index)mesh.n_elements * nm);

  if (variant == D2Variant::Naive) {
    // div(gdot) = -4 pi G div(m), with div(m) from the modal derivatives
    const BasisSet& mb = *momentum.basis;
    for (int e = 0; e < mesh.n_elements; ++e)
      for (int q = 0; q < b.nq_vol; ++q) {
        double div = 0.0;
        for (int a = 0; a < mesh.dim; ++a) {
          const double* cm = momentum.modes(e, a);
          double s = 0.0;
          for (int m = 0; m < mb.n_modes; ++m)
            s += cm[m] * mb.vol_grad[((size_t)q * mb.n_modes + m) * 3 + a];
          div += s;
        }
        const double wj = b.vol_w[q] * b.jac * four_pi_G * div;
        const double* bv = b.vol_value_row(q);
        for (int i = 0; i < nm; ++i) rhs[(Eigen::Index)e * nm + i] += wj * bv[i];
      }
  } else {
    if (!mass_flux) throw NumericalError("summation-by-parts solve needs the interface mass fluxes");
    // volume: - int 4 pi G m . grad(psi)
    parallel_for(mesh.n_elements, threads_, [&](int e) {
      for (int q = 0; q < b.nq_vol; ++q) {
        const double wj = b.vol_w[q] * b.jac * four_pi_G;
        for (int a = 0; a < mesh.dim; ++a) {
          const double ma = momentum.eval_volume_node(e, a, q);
          for (int i = 0; i < nm; ++i)
            rhs[(Eigen::Index)e * nm + i] -= wj * ma * b.vol_grad[((size_t)q * nm + i) * 3 + a];
        }
      }
    });
    // faces: + int 4 pi G fhat psi in the outward orientation of each owner
    for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
      const Face& f = mesh.faces[fi];
      const int a = f.axis;
      const double fj = b.face_jac[a];
      for (int mu = 0; mu < b.nq_face; ++mu) {
        const double fh = mass_flux->v[fi * b.nq_face + mu];
        const double w = fj * b.face_w[mu] * four_pi_G * fh;
        if (f.left >= 0) {
          const double* bv = b.face_value_row(a, 1, mu);
          for (int i = 0; i < nm; ++i) rhs[(Eigen::Index)f.left * nm + i] += w * bv[i];
        }
        if (f.right >= 0) {
          const double* bv = b.face_value_row(a, 0, mu);
          for (int i = 0; i < nm; ++i) rhs[(Eigen::Index)f.right * nm + i] -= w * bv[i];
        }
      }
    }
  }

  if (bc_ == PoissonBC::DirichletLike && dirichlet) {
    for (const Face& f : mesh.faces) {
      if (!f.boundary) continue;
      const int a = f.axis;
      const int e = f.right < 0 ? f.left : f.right;
      const int s = f.right < 0 ? 1 : 0;
      for (int mu = 0; mu < b.nq_face; ++mu) {
        const double phid = dirichlet(face_node_point(mesh, b, f, mu));
        const double w = b.face_jac[a] * b.face_w[mu] * pen_.c11 * phid;
        const double* bv = b.face_value_row(a, s, mu);
        for (int i = 0; i < nm; ++i) rhs[(Eigen::Index)e * nm + i] += w * bv[i];
      }
    }
  }
  if (bc_ == PoissonBC::DirichletLike && dirichlet) {
    DGField data_g = dirichlet_g_data(dirichlet);
    return solve_reduced(std::move(rhs), &data_g, dirichlet);
  }
  return solve_reduced(std::move(rhs), nullptr, dirichlet);
}

const Eigen::SparseMatrix<double>& PoissonSystem::schur() const {
  if (tensor_) throw NumericalError("tensor backend keeps no assembled Schur matrix");
  return A_;
}

Eigen::VectorXd PoissonSystem::apply_schur(const Eigen::VectorXd& x) const {
  return schur() * x;
}

double PoissonSystem::min_pivot() const {
  if (!ldlt_) throw NumericalError("no LDLT factorization available");
  return ldlt_->vectorD().minCoeff();
}

void PoissonSystem::dump_schur(std::ostream& os) const {
  const auto& A = schur();
  for (int col = 0; col < A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace sgdg
