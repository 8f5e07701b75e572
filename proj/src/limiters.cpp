#include "sgdg/limiters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "sgdg/errors.hpp"

namespace sgdg {

namespace {

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

}  // namespace

long oe_damp(DGField& field, double dt, const std::vector<double>& beta_axis,
             const DGField* reference) {
  if (!(dt > 0.0)) throw NumericalError("damping needs a positive time step");
  const CartesianMesh& mesh = *field.mesh;
  const BasisSet& b = *field.basis;
  const int k = b.degree;
  const int nc = field.n_comp;
  if (k == 0) return 0;

  const DGField* work = &field;  // rates always come from the full field

  // global means and sup-deviations per component
  std::vector<double> mean(nc, 0.0), denom(nc, 0.0), supval(nc, 0.0);
  for (int e = 0; e < mesh.n_elements; ++e)
    for (int c = 0; c < nc; ++c) mean[c] += work->c(e, c, 0) * b.sqrt_cellvol;
  for (int c = 0; c < nc; ++c) mean[c] /= mesh.domain_measure();
  for (int e = 0; e < mesh.n_elements; ++e)
    for (int q = 0; q < b.nq_vol; ++q)
      for (int c = 0; c < nc; ++c) {
        const double v = work->eval_volume_node(e, c, q);
        denom[c] = std::max(denom[c], std::abs(v - mean[c]));
        supval[c] = std::max(supval[c], std::abs(v));
      }
  std::vector<bool> active(nc);
  for (int c = 0; c < nc; ++c) active[c] = denom[c] > 1e-14 * std::max(1.0, supval[c]);

  // per-face jump seminorms, accumulated into per-element damping rates
  std::vector<double> rates((size_t)mesh.n_elements * (k + 1), 0.0);
  const int nbeta = (int)b.beta.size();
  const double norm_scale = std::pow(2.0, mesh.dim - 1);  // sum of face weights
  std::vector<double> jump_sum(k + 1);
  for (const Face& f : mesh.faces) {
    if (f.boundary) continue;  // ghost copies carry no jump
    const int a = f.axis;
    const double he = mesh.h[a];
    double sigma_max[8] = {0};  // per mode order, max over components
    for (int c = 0; c < nc; ++c) {
      if (!active[c]) continue;
      std::fill(jump_sum.begin(), jump_sum.end(), 0.0);
      for (int bi = 0; bi < nbeta; ++bi) {
        const int m = b.beta[bi][0] + b.beta[bi][1] + b.beta[bi][2];
        // face-normal derivative channels, the per-face form of the 1D rates
        if (b.beta[bi][a] != m) continue;
        double acc = 0.0;
        for (int mu = 0; mu < b.nq_face; ++mu) {
          const double* dl = b.face_deriv_row(a, 1, mu, bi);
          const double* dr = b.face_deriv_row(a, 0, mu, bi);
          const double* cl = work->modes(f.left, c);
          const double* cr = work->modes(f.right, c);
          double vl = 0.0, vr = 0.0;
          for (int mm = 0; mm < b.n_modes; ++mm) {
            vl += cl[mm] * dl[mm];
            vr += cr[mm] * dr[mm];
          }
          acc += b.face_w[mu] * std::abs(vl - vr);
        }
        jump_sum[m] += acc / norm_scale;
      }
      for (int m = 0; m <= k; ++m) {
        // the length factor of the seminorm is carried by the scaled
        // derivatives inside the jump integrals
        const double sig =
            (2.0 * m + 1.0) / (2.0 * (2.0 * k - 1.0) * factorial(m)) * jump_sum[m] / denom[c];
        sigma_max[m] = std::max(sigma_max[m], sig);
      }
    }
    const double bl = beta_axis[(size_t)f.left * 3 + a];
    const double br = beta_axis[(size_t)f.right * 3 + a];
    for (int m = 0; m <= k; ++m) {
      rates[(size_t)f.left * (k + 1) + m] += bl * sigma_max[m] / he;
      rates[(size_t)f.right * (k + 1) + m] += br * sigma_max[m] / he;
    }
  }

  long touched = 0;
  for (int e = 0; e < mesh.n_elements; ++e) {
    double cum = rates[(size_t)e * (k + 1)];
    double factor[8];
    bool any = false;
    for (int j = 1; j <= k; ++j) {
      cum += rates[(size_t)e * (k + 1) + j];
      factor[j] = std::exp(-dt * cum);
      if (factor[j] < 1.0) any = true;
    }
    if (!any) continue;
    ++touched;
    for (int c = 0; c < nc; ++c) {
      double* cm = field.modes(e, c);
      const double* rm = reference ? reference->modes(e, c) : nullptr;
      for (int m = 1; m < b.n_modes; ++m) {
        const int j = b.mode_degree[m];
        if (rm)
          cm[m] = rm[m] + factor[j] * (cm[m] - rm[m]);
        else
          cm[m] *= factor[j];
      }
    }
  }
  return touched;
}

std::vector<std::array<double, 3>> pp_check_nodes(const BasisSet& b) {
  const int dim = b.dim;
  const auto& gl = b.rule.gl_x;
  const auto& lob = b.rule.lob_x;
  std::vector<std::array<double, 3>> nodes;
  auto add_tensor = [&](const std::vector<double>* per_axis[3]) {
    std::array<int, 3> n{1, 1, 1};
    for (int a = 0; a < dim; ++a) n[a] = (int)per_axis[a]->size();
    for (int iz = 0; iz < n[2]; ++iz)
      for (int iy = 0; iy < n[1]; ++iy)
        for (int ix = 0; ix < n[0]; ++ix) {
          std::array<double, 3> x{0, 0, 0};
          const std::array<int, 3> id{ix, iy, iz};
          for (int a = 0; a < dim; ++a) x[a] = (*per_axis[a])[id[a]];
          nodes.push_back(x);
        }
  };
  const std::vector<double>* sel[3];
  for (int a = 0; a < dim; ++a) sel[a] = &gl;
  add_tensor(sel);  // the flux/source quadrature points themselves
  for (int lob_axis = 0; lob_axis < dim; ++lob_axis) {
    for (int a = 0; a < dim; ++a) sel[a] = (a == lob_axis) ? &lob : &gl;
    add_tensor(sel);
  }
  // drop duplicates
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const auto& p, const auto& q) {
                            return std::abs(p[0] - q[0]) < 1e-14 &&
                                   std::abs(p[1] - q[1]) < 1e-14 &&
                                   std::abs(p[2] - q[2]) < 1e-14;
                          }),
              nodes.end());
  return nodes;
}

long pp_limit(DGField& field, const DGField* grav_product, const GasModel& gas,
              const PPParams& params) {
  const CartesianMesh& mesh = *field.mesh;
  const BasisSet& b = *field.basis;
  const int dim = mesh.dim;
  const double floor = params.floor;

  // basis values at the check nodes, cached by basis signature
  using Key = std::tuple<int, int, int, double, double, double>;
  static std::map<Key, std::pair<std::vector<std::array<double, 3>>, std::vector<double>>> cache;
  const Key key{b.dim, b.degree, (int)b.trunc, b.h[0], b.h[1], b.h[2]};
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto nodes0 = pp_check_nodes(b);
    std::vector<double> vals0(nodes0.size() * b.n_modes, 0.0);
    const double inv_sqrtj = 1.0 / std::sqrt(b.jac);
    for (size_t q = 0; q < nodes0.size(); ++q)
      for (int m = 0; m < b.n_modes; ++m)
        vals0[q * b.n_modes + m] = b.eval_ref(m, nodes0[q]) * inv_sqrtj;
    it = cache.emplace(key, std::make_pair(std::move(nodes0), std::move(vals0))).first;
  }
  const auto& nodes = it->second.first;
  const auto& vals = it->second.second;
  const int nq = (int)nodes.size();
  const int nm = b.n_modes;

  auto eval_at = [&](const double* cm, int q) {
    double s = 0.0;
    const double* row = vals.data() + (size_t)q * nm;
    for (int m = 0; m < nm; ++m) s += cm[m] * row[m];
    return s;
  };

  long limited = 0;
  std::vector<double> evals(nq), qvals(nq);
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double* crho = field.modes(e, 0);
    const double* cen = field.modes(e, dim + 1);
    const double* cq = grav_product ? grav_product->modes(e, 0) : nullptr;

    const double rho_bar = field.cell_average(e, 0);
    double q_bar = cq ? cq[0] / b.sqrt_cellvol : 0.0;
    double m_bar[3] = {0, 0, 0}, ke = 0.0;
    for (int a = 0; a < dim; ++a) {
      m_bar[a] = field.cell_average(e, a + 1);
      ke += m_bar[a] * m_bar[a];
    }
    const double e_bar = field.cell_average(e, dim + 1) - q_bar;
    const double p_bar = (gas.gamma - 1.0) * (e_bar - 0.5 * ke / rho_bar);
    if (!(rho_bar > floor) || !(p_bar > floor))
      throw NumericalError("positivity limiter cannot recover cell " + std::to_string(e) +
                           " (nonpositive cell average)");

    // pass 1: density
    double rho_min = rho_bar;
    for (int q = 0; q < nq; ++q) rho_min = std::min(rho_min, eval_at(crho, q));
    double t1 = 1.0;
    if (rho_min < floor) t1 = (rho_bar - floor) / (rho_bar - rho_min);

    // pass 2: pressure along the scaling path
    for (int q = 0; q < nq; ++q) {
      evals[q] = eval_at(cen, q);
      if (cq) qvals[q] = eval_at(cq, q);
    }
    auto pressure_at = [&](int q, double t_rho, double t_all) {
      // rho scaled by t1 then t_all; m, E by t_all; relative to cell means
      const double rho =
          rho_bar + t_all * (t_rho * (eval_at(crho, q) - rho_bar));
      double mk = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double mv = m_bar[a] + t_all * (eval_at(field.modes(e, a + 1), q) - m_bar[a]);
        mk += mv * mv;
      }
      const double en = e_bar + t_all * ((evals[q] - (cq ? qvals[q] : 0.0)) - e_bar);
      return (gas.gamma - 1.0) * (en - 0.5 * mk / rho);
    };
    double t2 = 1.0;
    for (int q = 0; q < nq; ++q) {
      if (pressure_at(q, t1, 1.0) >= floor) continue;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pressure_at(q, t1, mid) >= floor ? lo : hi) = mid;
      }
      t2 = std::min(t2, lo);
    }

    if (t1 >= 1.0 && t2 >= 1.0) continue;
    ++limited;
    double* wrho = field.modes(e, 0);
    double* wen = field.modes(e, dim + 1);
    for (int m = 1; m < nm; ++m) {
      const double e_old = wen[m] - (cq ? cq[m] : 0.0);
      wrho[m] *= t1 * t2;
      for (int a = 0; a < dim; ++a) field.modes(e, a + 1)[m] *= t2;
      wen[m] += (t2 - 1.0) * e_old;
    }
  }
  return limited;
}

}  // namespace sgdg
