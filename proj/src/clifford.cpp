#include "cfl/clifford.hpp"

#include <cmath>

#include "cfl/util.hpp"

namespace cfl::clifford {

CliffordSubspace check_clifford(const std::vector<Matrix>& ops, const Eigen::VectorXi& spin_signs,
                                double tol) {
  if (ops.empty()) throw std::invalid_argument("check_clifford: empty basis");
  const int d = (int)ops.front().rows();
  const int m = (int)ops.size();
  CliffordSubspace k;
  k.spin_signs = spin_signs;
  k.basis = ops;
  k.gram.resize(m, m);
  double scale = 0.0;
  for (const auto& u : ops) {
    if (u.rows() != d || u.cols() != d) throw std::invalid_argument("check_clifford: shape mismatch");
    if (!opcore::is_spin_symmetric(u, spin_signs, tol))
      throw std::runtime_error("check_clifford: basis operator not symmetric w.r.t. the spin product");
    scale = std::max(scale, u.norm());
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Matrix ac = ops[i] * ops[j] + ops[j] * ops[i];
      cplx g = ac.trace() / (2.0 * d);
      if ((ac - 2.0 * g * Matrix::Identity(d, d)).norm() > tol * std::max(1.0, scale * scale))
        throw std::runtime_error("check_clifford: anticommutator not a multiple of the identity");
      if (std::abs(g.imag()) > tol * std::max(1.0, scale * scale))
        throw std::runtime_error("check_clifford: complex anticommutator scalar");
      k.gram(i, j) = g.real();
    }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(k.gram);
  double gs = std::max(1.0, k.gram.norm());
  for (int i = 0; i < m; ++i) {
    double ev = es.eigenvalues()(i);
    if (std::abs(ev) < 1e-9 * gs) throw std::runtime_error("check_clifford: degenerate gram");
    (ev > 0 ? k.sig_pos : k.sig_neg)++;
  }
  bool riemannian = true;
  for (int i = 0; i < spin_signs.size(); ++i)
    if (spin_signs(i) != 1) riemannian = false;
  if (riemannian && k.sig_neg != 0)
    throw std::runtime_error("check_clifford: Riemannian Clifford subspace must have signature (m,0)");
  return k;
}

std::vector<Matrix> ExtensionFamily::member_basis(const RealVector& param) const {
  if (kind == FamilyKind::CausalExtension) {
    double phi = param(0);
    return {mats::gamma0(),
            Matrix(std::cos(phi) * mats::gamma1() + std::sin(phi) * mats::gamma2())};
  }
  double th = param(0), ph = param(1);
  Eigen::Vector3d nv(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  Eigen::Vector3d a = std::abs(nv(2)) < 0.9 ? Eigen::Vector3d(0, 0, 1) : Eigen::Vector3d(1, 0, 0);
  Eigen::Vector3d u = nv.cross(a).normalized();
  Eigen::Vector3d v = nv.cross(u).normalized();
  auto dot = [](const Eigen::Vector3d& x) {
    return Matrix(x(0) * mats::sigma1() + x(1) * mats::sigma2() + x(2) * mats::sigma3());
  };
  return {dot(u), dot(v)};
}

CliffordSubspace ExtensionFamily::member(const RealVector& param) const {
  return check_clifford(member_basis(param), spin_signs);
}

ExtensionFamily extension_family_from_signs(const Eigen::VectorXi& spin_signs) {
  if (spin_signs.size() != 2)
    throw std::invalid_argument("extension_family: only d = 2 spin spaces are parametrized");
  ExtensionFamily fam;
  fam.spin_signs = spin_signs;
  bool riemannian = spin_signs(0) == 1 && spin_signs(1) == 1;
  fam.kind = riemannian ? FamilyKind::RiemannianPlane : FamilyKind::CausalExtension;
  return fam;
}

ExtensionFamily extension_family(const opcore::SpinSpace& s) {
  return extension_family_from_signs(s.signs);
}

std::vector<Matrix> symm_basis(const Eigen::VectorXi& spin_signs) {
  const int d = (int)spin_signs.size();
  std::vector<Matrix> basis;
  for (int a = 0; a < d; ++a) {
    Matrix e = Matrix::Zero(d, d);
    e(a, a) = 1.0;
    basis.push_back(e);
  }
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      double s = (double)(spin_signs(a) * spin_signs(b));
      Matrix e1 = Matrix::Zero(d, d), e2 = Matrix::Zero(d, d);
      e1(a, b) = 1.0;
      e1(b, a) = s;
      e2(a, b) = cplx(0, 1);
      e2(b, a) = cplx(0, -s);
      basis.push_back(e1);
      basis.push_back(e2);
    }
  return basis;
}

AcSpace ac_space(const opcore::SpinSpace& s) {
  AcSpace out;
  const int d = s.dim();
  Matrix sx = s.gram();  // Euclidean sign operator in the frame
  auto symm = symm_basis(s.signs);
  const int n = (int)symm.size();
  // real linear map u -> {u, s_x} on the Symm basis; kernel = AC(s_x)
  RealMatrix a(2 * d * d, n);
  for (int j = 0; j < n; ++j) {
    Matrix ac = symm[j] * sx + sx * symm[j];
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        a(2 * (r * d + c), j) = ac(r, c).real();
        a(2 * (r * d + c) + 1, j) = ac(r, c).imag();
      }
  }
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  std::vector<Matrix> raw;
  for (int j = 0; j < svd.matrixV().cols(); ++j) {
    double sv = j < svd.singularValues().size() ? svd.singularValues()(j) : 0.0;
    if (sv > 1e-10 * std::max(1.0, smax)) continue;
    Matrix u = Matrix::Zero(d, d);
    for (int i = 0; i < n; ++i) u += svd.matrixV()(i, j) * symm[i];
    raw.push_back(u);
  }
  // Gram-Schmidt in the trace form (negative definite on AC), normalized to
  // <u,u> = -1, so the reported Gram is -id in exact arithmetic.
  auto tform = [d](const Matrix& u, const Matrix& v) { return (u * v).trace().real() / d; };
  for (Matrix u : raw) {
    for (const auto& v : out.basis) u -= (tform(v, u) / tform(v, v)) * v;
    double q = tform(u, u);
    if (q > -1e-12) continue;
    out.basis.push_back(u / std::sqrt(-q));
  }
  const int m = (int)out.basis.size();
  out.gram.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.gram(i, j) = tform(out.basis[i], out.basis[j]);
  if (m > 0) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(out.gram);
    out.gram_eigenvalues = es.eigenvalues();
    out.negative_definite = out.gram_eigenvalues.maxCoeff() < -1e-9;
  } else {
    out.negative_definite = true;  // vacuously: nothing anticommutes with the identity
  }
  return out;
}

Matrix pin_generator(const Matrix& v, const Eigen::VectorXi& spin_signs, double tol) {
  const int d = (int)v.rows();
  Matrix v2 = v * v;
  double scale = std::max(1.0, v2.norm());
  Matrix g;
  if ((v2 - Matrix::Identity(d, d)).norm() < tol * scale) {
    g = v;
  } else if ((v2 + Matrix::Identity(d, d)).norm() < tol * scale) {
    g = cplx(0, 1) * v;
  } else {
    throw std::runtime_error("pin_generator: v^2 is not +-identity");
  }
  // For a symmetric spacelike v in the causal case, (iv)*(iv) = v^2 = -1: the
  // group element is unitary only up to the projective sign, which drops out
  // of the adjoint action.
  Matrix gs = opcore::spin_adjoint(g, spin_signs, spin_signs);
  Matrix gg = gs * g;
  if ((gg - Matrix::Identity(d, d)).norm() > 1e-9 * scale &&
      (gg + Matrix::Identity(d, d)).norm() > 1e-9 * scale)
    throw std::runtime_error("pin_generator: resulting element not unitary up to sign");
  return g;
}

AdjointAction adjoint_action(const Matrix& g, const CliffordSubspace& k) {
  AdjointAction out;
  const int m = k.dim();
  out.matrix.resize(m, m);
  Matrix ginv = g.inverse();
  RealMatrix graminv = k.gram.inverse();
  double resid = 0.0;
  for (int j = 0; j < m; ++j) {
    Matrix w = g * k.basis[j] * ginv;
    RealVector rhs(m);
    for (int i = 0; i < m; ++i)
      rhs(i) = ((k.basis[i] * w + w * k.basis[i]).trace() / (2.0 * (double)w.rows())).real();
    RealVector c = graminv * rhs;
    Matrix recon = Matrix::Zero(w.rows(), w.cols());
    for (int i = 0; i < m; ++i) recon += c(i) * k.basis[i];
    resid = std::max(resid, (w - recon).norm());
    out.matrix.col(j) = c;
  }
  out.residual = resid;
  return out;
}

StabilizerMembership stabilizer_membership(const Matrix& u, const CliffordSubspace& k, double tol) {
  StabilizerMembership out;
  AdjointAction act = adjoint_action(u, k);
  double scale = 0.0;
  for (const auto& b : k.basis) scale = std::max(scale, b.norm());
  out.in_GK = act.residual < tol * std::max(1.0, scale);
  if (out.in_GK) {
    double dev = 0.0;
    Matrix uinv = u.inverse();
    for (const auto& b : k.basis) dev = std::max(dev, (u * b * uinv - b).norm());
    out.in_G0 = dev < tol * std::max(1.0, scale);
  }
  return out;
}

namespace {
// pseudo-orthonormal generators of K matching a diagonal gram, +1 entries first
std::vector<Matrix> normalized_generators(const CliffordSubspace& k, Eigen::VectorXi& eta) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(k.gram);
  const int m = k.dim();
  std::vector<std::pair<double, RealVector>> cols;
  for (int i = 0; i < m; ++i) cols.push_back({es.eigenvalues()(i), es.eigenvectors().col(i)});
  std::sort(cols.begin(), cols.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Matrix> gen;
  eta.resize(m);
  for (int i = 0; i < m; ++i) {
    Matrix u = Matrix::Zero(k.basis.front().rows(), k.basis.front().cols());
    for (int j = 0; j < m; ++j) u += cols[i].second(j) * k.basis[j];
    gen.push_back(u / std::sqrt(std::abs(cols[i].first)));
    eta(i) = cols[i].first > 0 ? 1 : -1;
  }
  return gen;
}
}  // namespace

Matrix clifford_compatible_frame(const opcore::SpinSpace& s, const CliffordSubspace& k,
                                 const std::vector<Matrix>& model, double tol) {
  CliffordSubspace km = check_clifford(model, s.signs, 1e-8);
  if (km.sig_pos != k.sig_pos || km.sig_neg != k.sig_neg)
    throw std::runtime_error("clifford_compatible_frame: model and K have different signatures");
  Eigen::VectorXi eta_k, eta_m;
  std::vector<Matrix> gk = normalized_generators(k, eta_k);
  std::vector<Matrix> gm = normalized_generators(km, eta_m);
  const int m = (int)gk.size();
  const int d = (int)gk.front().rows();

  // Intertwiner by averaging over the 2^m canonical words of the Clifford group:
  // C = sum_w k_w X m_w^{-1} satisfies k_i C = C m_i for irreducible pairs.
  auto gen2 = util::rng(0x5eedULL);
  for (int attempt = 0; attempt < 24; ++attempt) {
    Matrix x = util::random_hermitian(d, gen2);
    Matrix c = Matrix::Zero(d, d);
    for (int mask = 0; mask < (1 << m); ++mask) {
      Matrix kw = Matrix::Identity(d, d), mw = Matrix::Identity(d, d);
      for (int i = 0; i < m; ++i)
        if (mask & (1 << i)) {
          kw = kw * gk[i];
          mw = mw * gm[i];
        }
      c += kw * x * mw.inverse();
    }
    if (std::abs(c.determinant()) < 1e-10) continue;
    // scale to spin-unitary: C* C = lambda id on an irreducible representation
    Matrix cs = opcore::spin_adjoint(c, s.signs, s.signs);
    Matrix csc = cs * c;
    cplx lam = csc.trace() / (double)d;
    if ((csc - lam * Matrix::Identity(d, d)).norm() > 1e-8 * csc.norm()) continue;
    if (lam.real() <= 0.0 || std::abs(lam.imag()) > 1e-8 * std::abs(lam)) continue;
    c /= std::sqrt(lam.real());
    Matrix cinv = c.inverse();
    double resid = 0.0;
    for (int i = 0; i < m; ++i) resid = std::max(resid, (cinv * gk[i] * c - gm[i]).norm());
    if (resid < tol * 10) return c;
  }
  throw std::runtime_error("clifford_compatible_frame: no spin-unitary intertwiner found");
}

double subspace_distance(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  auto orthonormalize = [](const std::vector<Matrix>& v) {
    std::vector<Matrix> q;
    for (auto m : v) {
      for (const auto& u : q) m -= util::hs_inner(u, m) * u;
      double n = m.norm();
      if (n > 1e-12) q.push_back(m / n);
    }
    return q;
  };
  auto qa = orthonormalize(a), qb = orthonormalize(b);
  if (qa.empty() || qb.empty()) return qa.size() == qb.size() ? 0.0 : M_PI / 2;
  // largest principal angle via its sine: ||(1 - P_B)|_A||, from explicit
  // residual vectors (stable near zero, unlike acos of a cross-gram)
  std::vector<Matrix> resid;
  for (const auto& u : qa) {
    Matrix r = u;
    for (const auto& w : qb) r -= util::hs_inner(w, u) * w;
    resid.push_back(r);
  }
  RealMatrix gram((int)resid.size(), (int)resid.size());
  for (size_t i = 0; i < resid.size(); ++i)
    for (size_t j = 0; j < resid.size(); ++j)
      gram((int)i, (int)j) = util::hs_inner(resid[i], resid[j]);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram);
  double sinmax = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  double worst = std::asin(std::min(1.0, sinmax));
  if (qa.size() != qb.size()) worst = std::max(worst, M_PI / 2);
  return worst;
}

double subspace_distance(const CliffordSubspace& a, const CliffordSubspace& b) {
  return subspace_distance(a.basis, b.basis);
}

}  // namespace cfl::clifford
