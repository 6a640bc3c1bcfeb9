#include "cfl/tangentcone.hpp"

#include <algorithm>
#include <cmath>

#include "cfl/util.hpp"

namespace cfl::tangentcone {

namespace {

using builders::SampledSystem;

Matrix sign_op_H(const opcore::SpinSpace& s) {
  // sign of (-y) on its image, extended by zero: -sum sign(nu_i) v_i v_i^dagger
  Matrix out = Matrix::Zero(s.point->dim(), s.point->dim());
  for (int k = 0; k < s.dim(); ++k) {
    Vector v = s.frame.col(k) * std::sqrt(std::abs(s.eigvals(k)));  // unit eigenvector
    out -= (s.eigvals(k) > 0 ? 1.0 : -1.0) * (v * v.adjoint());
  }
  return out;
}

Matrix proj_H(const opcore::SpinSpace& s) {
  Matrix out = Matrix::Zero(s.point->dim(), s.point->dim());
  for (int k = 0; k < s.dim(); ++k) {
    Vector v = s.frame.col(k) * std::sqrt(std::abs(s.eigvals(k)));
    out += v * v.adjoint();
  }
  return out;
}

Matrix frame_rep(const opcore::SpinSpace& sx, const Matrix& op_H) {
  // A_ab = s_a <f_a| Op f_b>_x = -s_a (f_a, X Op f_b)
  Matrix m = -(sx.frame.adjoint() * (sx.point->matrix() * (op_H * sx.frame)));
  for (int a = 0; a < m.rows(); ++a) m.row(a) *= (double)sx.signs(a);
  return m;
}

Matrix apply_part(Matrix a, FunctionalPart part, const Eigen::VectorXi& signs) {
  if (part == FunctionalPart::Full) return a;
  Matrix g = Matrix::Zero(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) g(i, i) = (double)signs(i);
  Matrix sas = g * a * g;
  return part == FunctionalPart::Diag ? Matrix(0.5 * (a + sas)) : Matrix(0.5 * (a - sas));
}

}  // namespace

Eigen::VectorXi spin_signs_at(const SampledSystem& sys, int i) {
  if (sys.matrix_backed()) return sys.spin[i].signs;
  Eigen::Vector2d nu = sys.provider->eval_nu();
  Eigen::VectorXi s(2);
  s << (nu(0) < 0 ? 1 : -1), (nu(1) < 0 ? 1 : -1);
  return s;
}

Matrix eval_A(const SampledSystem& sys, int ix, int iy, const ConeFunctional& f) {
  if (sys.matrix_backed()) {
    const auto& sx = sys.spin[ix];
    const auto& sy = sys.spin[iy];
    const Matrix& x = sx.point->matrix();
    const Matrix& y = sy.point->matrix();
    Matrix op;
    switch (f.kind) {
      case FunctionalKind::Chain:
        op = (y - x) * x;  // pi_x absorbed by the left factor x in the frame map
        break;
      case FunctionalKind::SignDiff:
        op = (sign_op_H(sy) - sign_op_H(sx)) * x;
        break;
      case FunctionalKind::ProjDiff:
        op = (proj_H(sy) - proj_H(sx)) * x;
        break;
    }
    return f.scale * apply_part(frame_rep(sx, op), f.part, sx.signs);
  }

  return provider_functional_matrix(*sys.provider, f, sys.samples[ix].coords.head<2>(),
                                    sys.samples[iy].coords.head<2>());
}

Matrix provider_functional_matrix(const builders::KernelProvider& prov, const ConeFunctional& f,
                                  const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
  builders::PairFrames pf = builders::pair_frames(prov, x, y);
  Mat2 d = Mat2::Zero(), dinv = Mat2::Zero(), dabs = Mat2::Zero();
  for (int i = 0; i < 2; ++i) {
    d(i, i) = pf.nu(i);
    dinv(i, i) = 1.0 / pf.nu(i);
    dabs(i, i) = 1.0 / std::abs(pf.nu(i));
  }
  Mat2 a;
  switch (f.kind) {
    case FunctionalKind::Chain:
      a = pf.P_xy * pf.P_yx - d * d;
      break;
    case FunctionalKind::SignDiff:
      a = -(pf.P_xy * dabs * pf.P_yx) + d * dabs * d;
      break;
    case FunctionalKind::ProjDiff:
      a = pf.P_xy * dinv * pf.P_yx - d;
      break;
  }
  return f.scale * apply_part(a, f.part, pf.signs);
}

double op_distance(const SampledSystem& sys, int i, int j) {
  if (sys.matrix_backed())
    return util::op_norm(sys.samples[j].point->matrix() - sys.samples[i].point->matrix());
  return builders::pair_op_distance(builders::pair_frames(
      *sys.provider, sys.samples[i].coords.head<2>(), sys.samples[j].coords.head<2>()));
}

int ConeCells::assign(const Matrix& unit_dir) const {
  int best = -1;
  double best_ip = -2.0;
  for (size_t c = 0; c < centers.size(); ++c) {
    double ip = util::hs_inner(centers[c], unit_dir);
    if (ip > best_ip) {
      best_ip = ip;
      best = (int)c;
    }
  }
  return best;
}

ConeCells circle_cells(int n) {
  ConeCells cells;
  cells.description = "circle(" + std::to_string(n) + ")+offplane";
  const double isq = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    double phi = 2.0 * M_PI * (i + 0.5) / n;
    cells.centers.push_back(isq * (std::cos(phi) * mats::sigma1() + std::sin(phi) * mats::sigma2()));
  }
  for (double s : {1.0, -1.0}) {
    cells.centers.push_back(s * isq * Matrix(Matrix::Identity(2, 2)));
    cells.centers.push_back(s * isq * mats::sigma3());
  }
  return cells;
}

ConeCells atom_cells() {
  ConeCells cells;
  cells.description = "atoms(+-gamma2)+catch";
  const double isq = 1.0 / std::sqrt(2.0);
  cells.centers.push_back(isq * mats::gamma2());
  cells.centers.push_back(-isq * mats::gamma2());
  for (double s : {1.0, -1.0}) {
    cells.centers.push_back(s * isq * Matrix(Matrix::Identity(2, 2)));
    cells.centers.push_back(s * isq * mats::gamma0());
    cells.centers.push_back(s * isq * mats::gamma1());
  }
  return cells;
}

ConeCells random_cells(int n, const Eigen::VectorXi& spin_signs, uint64_t seed) {
  ConeCells cells;
  cells.description = "random(" + std::to_string(n) + ")";
  auto basis = clifford::symm_basis(spin_signs);
  auto gen = util::rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    Matrix m = Matrix::Zero(spin_signs.size(), spin_signs.size());
    for (const auto& b : basis) m += nd(gen) * b;
    cells.centers.push_back(m / m.norm());
  }
  return cells;
}

double ConeMeasureEstimate::total() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

namespace {
RealVector default_ladder(const SampledSystem& sys, int ix) {
  // median nearest-neighbor distance estimated from a subsample
  const int n = (int)sys.samples.size();
  std::vector<double> nn;
  int step = std::max(1, n / 64);
  for (int i = 0; i < n; i += step) {
    double best = 1e300;
    // nearest in coordinates, then measured in the operator metric
    int jbest = -1;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double dc = (sys.samples[i].coords - sys.samples[j].coords).norm();
      if (dc < best) {
        best = dc;
        jbest = j;
      }
    }
    if (jbest >= 0) nn.push_back(op_distance(sys, i, jbest));
  }
  std::sort(nn.begin(), nn.end());
  double med = nn.empty() ? 1.0 : nn[nn.size() / 2];
  (void)ix;
  RealVector ladder(6);
  for (int k = 0; k < 6; ++k) ladder(k) = 10.0 * med * std::pow(0.5, k);
  return ladder;
}
}  // namespace

ConeMeasureEstimate estimate_cone_measure(const SampledSystem& sys, int ix, const ConeFunctional& f,
                                          const std::optional<ConeWindow>& window,
                                          const ConeCells& cells,
                                          std::optional<RealVector> ladder) {
  if (window && !(window->alpha >= 0.0 && window->alpha < window->beta))
    throw std::invalid_argument("estimate_cone_measure: need 0 <= alpha < beta");
  ConeMeasureEstimate out;
  out.cells_desc = cells.description;
  out.delta_ladder = ladder ? *ladder : default_ladder(sys, ix);

  const int n = (int)sys.samples.size();
  const int nc = (int)cells.centers.size();

  struct Entry {
    double anorm = 0.0, w = 0.0;
    int cell = -1;
    bool in_window = false;
    Matrix dir;
  };
  std::vector<Entry> entries(n);
  util::parallel_for(n, [&](int j) {
    Entry& e = entries[j];
    e.w = sys.samples[j].weight;
    if (j == ix) return;  // A(x) = 0: contributes to mu(B_delta) only
    Matrix a = eval_A(sys, ix, j, f);
    e.anorm = a.norm();
    if (e.anorm < 1e-300) return;
    e.dir = a / e.anorm;
    e.cell = cells.assign(e.dir);
    if (window) {
      double d = op_distance(sys, ix, j);
      e.in_window = (e.anorm > std::pow(d, window->beta)) && (e.anorm < std::pow(d, window->alpha));
    } else {
      e.in_window = true;
    }
  });

  if (out.delta_ladder.size() == 0) throw std::invalid_argument("estimate_cone_measure: empty ladder");
  if (n <= 1) return out;  // single-point system: empty estimate
  {
    double dmax = out.delta_ladder.maxCoeff();
    bool any = false;
    for (int j = 0; j < n; ++j)
      if (j != ix && entries[j].anorm > 0 && entries[j].anorm < dmax) any = true;
    if (!any) throw std::runtime_error("estimate_cone_measure: point isolated at this scale");
  }

  std::vector<double> best_w(nc, 0.0);
  std::vector<int> best_rung(nc, -1);
  for (int k = 0; k < out.delta_ladder.size(); ++k) {
    double delta = out.delta_ladder(k);
    double denom = 0.0;
    std::vector<double> cw(nc, 0.0);
    for (int j = 0; j < n; ++j) {
      const Entry& e = entries[j];
      if (j == ix || e.anorm < delta) denom += e.w;
      if (j != ix && e.anorm > 0 && e.anorm < delta && e.in_window && e.cell >= 0)
        cw[e.cell] += e.w;
    }
    if (denom <= 0.0) continue;
    for (int c = 0; c < nc; ++c) {
      if (cw[c] / denom > best_w[c]) {
        best_w[c] = cw[c] / denom;
        best_rung[c] = k;
      }
    }
  }

  for (int c = 0; c < nc; ++c) {
    if (best_rung[c] < 0 || best_w[c] <= 0.0) continue;
    double delta = out.delta_ladder(best_rung[c]);
    Matrix acc;
    bool first = true;
    for (int j = 0; j < n; ++j) {
      const Entry& e = entries[j];
      if (j == ix || e.cell != c || !(e.anorm > 0 && e.anorm < delta) || !e.in_window) continue;
      if (first) {
        acc = e.w * e.dir;
        first = false;
      } else {
        acc += e.w * e.dir;
      }
    }
    if (first) continue;
    double nrm = acc.norm();
    if (nrm < 1e-300) continue;
    out.directions.push_back(acc / nrm);
    out.weights.push_back(best_w[c]);
    out.cell_index.push_back(c);
    out.delta_used.push_back(delta);
  }
  if (out.total() > 1.0 + 1e-9)
    throw std::runtime_error("estimate_cone_measure: total weight exceeds 1");
  return out;
}

double L_functional(const std::vector<Matrix>& u_basis, const ConeMeasureEstimate& mu,
                    const std::optional<Eigen::VectorXi>& restrict_ac_signs) {
  // orthonormalize U in the real HS metric
  std::vector<Matrix> q;
  for (Matrix m : u_basis) {
    for (const auto& u : q) m -= util::hs_inner(u, m) * u;
    double nn = m.norm();
    if (nn > 1e-12) q.push_back(m / nn);
  }
  std::vector<Matrix> ac;
  if (restrict_ac_signs) {
    opcore::SpinSpace tmp;
    tmp.signs = *restrict_ac_signs;
    tmp.eigvals = RealVector::Zero(restrict_ac_signs->size());
    ac = clifford::ac_space(tmp).basis;
  }
  double total = 0.0;
  for (size_t i = 0; i < mu.directions.size(); ++i) {
    Matrix e = mu.directions[i];
    if (restrict_ac_signs) {
      Matrix p = Matrix::Zero(e.rows(), e.cols());
      for (const auto& b : ac) p += util::hs_inner(b, e) * b;
      double nn = p.norm();
      if (nn < 1e-9) continue;  // direction orthogonal to AC contributes nothing
      e = p / nn;
    }
    double val = 0.0;
    for (const auto& u : q) {
      double ip = util::hs_inner(u, e);
      val += ip * ip;
    }
    total += mu.weights[i] * val;
  }
  return total;
}

namespace {
RealVector grid_param(const clifford::ExtensionFamily& fam, int idx, int n) {
  if (fam.param_dim() == 1) {
    RealVector p(1);
    p << M_PI * idx / n;  // K^(phi+pi) = K^(phi)
    return p;
  }
  // Fibonacci sphere
  RealVector p(2);
  double z = 1.0 - 2.0 * (idx + 0.5) / n;
  p << std::acos(z), std::fmod(idx * 2.399963229728653, 2.0 * M_PI);
  return p;
}
}  // namespace

MaximizeResult maximize_clifford(const ConeMeasureEstimate& mu,
                                 const clifford::ExtensionFamily& family, int grid_n,
                                 double separation_tol) {
  std::optional<Eigen::VectorXi> ac;
  if (family.kind == clifford::FamilyKind::CausalExtension) ac = family.spin_signs;
  auto value_at = [&](const RealVector& p) {
    return L_functional(family.member_basis(p), mu, ac);
  };

  std::vector<RealVector> params;
  std::vector<double> values;
  double best = -1e300, worst = 1e300;
  int best_i = 0;
  for (int i = 0; i < grid_n; ++i) {
    RealVector p = grid_param(family, i, grid_n);
    double v = value_at(p);
    params.push_back(p);
    values.push_back(v);
    if (v > best) {
      best = v;
      best_i = i;
    }
    worst = std::min(worst, v);
  }

  MaximizeResult out;
  if (best - worst < separation_tol) {
    out.degenerate = true;
    out.unique = false;
    out.param = params[best_i];
    out.value = best;
    out.maximizer = family.member(params[best_i]);
    return out;
  }

  // local refinement
  RealVector p = params[best_i];
  if (family.param_dim() == 1) {
    double lo = p(0) - M_PI / grid_n, hi = p(0) + M_PI / grid_n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    RealVector v1(1), v2(1);
    v1 << x1;
    v2 << x2;
    double f1 = value_at(v1), f2 = value_at(v2);
    for (int it = 0; it < 48; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        v2 << x2;
        f2 = value_at(v2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        v1 << x1;
        f1 = value_at(v1);
      }
    }
    p(0) = 0.5 * (a + b);
  } else {
    double step = 2.0 / std::sqrt((double)grid_n);
    for (int round = 0; round < 10; ++round) {
      RealVector bestp = p;
      double bestv = value_at(p);
      for (int di = -2; di <= 2; ++di)
        for (int dj = -2; dj <= 2; ++dj) {
          RealVector q = p;
          q(0) += di * step / 2;
          q(1) += dj * step / 2;
          q(0) = std::clamp(q(0), 0.0, M_PI);
          double v = value_at(q);
          if (v > bestv) {
            bestv = v;
            bestp = q;
          }
        }
      p = bestp;
      step *= 0.5;
    }
  }
  out.param = p;
  out.value = value_at(p);
  out.maximizer = family.member(p);

  // uniqueness: all near-best grid candidates must describe the same subspace
  out.unique = true;
  for (int i = 0; i < grid_n; ++i) {
    if (values[i] < out.value - separation_tol) continue;
    double dist = clifford::subspace_distance(family.member_basis(params[i]), out.maximizer.basis);
    if (dist > 0.15) {
      out.unique = false;
      break;
    }
  }
  return out;
}

SectionResult tangential_section(const SampledSystem& sys, const ConeFunctional& f,
                                 const clifford::ExtensionFamily& family,
                                 const std::vector<int>& points,
                                 const std::optional<ConeWindow>& window, const ConeCells& cells) {
  SectionResult out;
  for (int ix : points) {
    ConeMeasureEstimate mu = estimate_cone_measure(sys, ix, f, window, cells);
    MaximizeResult res = maximize_clifford(mu, family);
    if (res.degenerate || !res.unique) {
      out.aborted = true;
      out.per_point.push_back(std::move(res));
      return out;
    }
    out.per_point.push_back(std::move(res));
  }
  for (size_t i = 0; i + 1 < out.per_point.size(); ++i)
    out.continuity_gap =
        std::max(out.continuity_gap, clifford::subspace_distance(out.per_point[i].maximizer,
                                                                 out.per_point[i + 1].maximizer));
  return out;
}

AnticommuteCheck window_anticommute_check(const SampledSystem& sys, int ix,
                                          const ConeWindow& window, const ConeCells& cells) {
  AnticommuteCheck out;
  if (!(window.beta < 2.0)) {
    out.skipped = true;
    out.warning = "window beta >= 2: anticommutation lemma does not apply, check skipped";
    return out;
  }
  Eigen::VectorXi signs = spin_signs_at(sys, ix);
  bool riemannian = true;
  for (int i = 0; i < signs.size(); ++i)
    if (signs(i) != 1) riemannian = false;
  if (riemannian) return out;  // s_x = id, AC trivial, support empty

  ConeFunctional f;
  f.kind = FunctionalKind::SignDiff;
  ConeMeasureEstimate mu = estimate_cone_measure(sys, ix, f, window, cells);
  Matrix g = Matrix::Zero(signs.size(), signs.size());
  for (int i = 0; i < signs.size(); ++i) g(i, i) = (double)signs(i);
  for (size_t i = 0; i < mu.directions.size(); ++i) {
    if (mu.weights[i] < 1e-6) continue;
    const Matrix& e = mu.directions[i];
    out.max_residual = std::max(out.max_residual, (g * e + e * g).norm());
  }
  return out;
}

}  // namespace cfl::tangentcone
