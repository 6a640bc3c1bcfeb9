#include "cfl/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cfl/util.hpp"

namespace cfl::opcore {

FermionPoint::FermionPoint(Matrix m, double rank_tol_scale) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) throw std::invalid_argument("FermionPoint: square matrix required");
  double scale = std::max(1.0, mat_.norm());
  if (util::herm_residual(mat_) > kHermTol * scale)
    throw std::invalid_argument("FermionPoint: matrix not self-adjoint within 1e-12");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mat_ + Matrix(mat_.adjoint())));
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
  rank_tol_ = rank_tol_scale * std::max(mat_.norm(), 1e-300);
}

int FermionPoint::positive_count() const {
  int c = 0;
  for (int i = 0; i < evals_.size(); ++i)
    if (evals_(i) > rank_tol_) ++c;
  return c;
}

int FermionPoint::negative_count() const {
  int c = 0;
  for (int i = 0; i < evals_.size(); ++i)
    if (evals_(i) < -rank_tol_) ++c;
  return c;
}

Matrix SpinSpace::gram() const {
  Matrix g = Matrix::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) g(i, i) = (double)signs(i);
  return g;
}

double spin_symmetry_residual(const Matrix& a, const Eigen::VectorXi& signs) {
  Matrix g = Matrix::Zero(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) g(i, i) = (double)signs(i);
  Matrix ga = g * a;
  return (ga - Matrix(ga.adjoint())).norm();
}

bool is_spin_symmetric(const Matrix& a, const Eigen::VectorXi& signs, double tol) {
  return spin_symmetry_residual(a, signs) <= tol * std::max(1.0, a.norm());
}

Matrix spin_adjoint(const Matrix& a, const Eigen::VectorXi& signs_from, const Eigen::VectorXi& signs_to) {
  // a: S_from -> S_to; adjoint = G_from a^dagger G_to : S_to -> S_from
  Matrix ad = a.adjoint();
  for (int i = 0; i < ad.rows(); ++i) ad.row(i) *= (double)signs_from(i);
  for (int j = 0; j < ad.cols(); ++j) ad.col(j) *= (double)signs_to(j);
  return ad;
}

const char* relation_name(CausalRelation r) {
  switch (r) {
    case CausalRelation::Timelike: return "timelike";
    case CausalRelation::Spacelike: return "spacelike";
    default: return "lightlike";
  }
}

CausalRelation classify_lambdas(const std::vector<cplx>& lambdas, const CausalTols& tols) {
  if (lambdas.empty()) return CausalRelation::Lightlike;
  bool all_real = true;
  for (const auto& l : lambdas)
    if (std::abs(l.imag()) > tols.tol_real * std::max(1.0, std::abs(l))) all_real = false;
  if (all_real) return CausalRelation::Timelike;
  bool all_complex = true;
  double lo = 1e300, hi = 0.0;
  for (const auto& l : lambdas) {
    if (std::abs(l.imag()) <= tols.tol_real * std::max(1.0, std::abs(l))) all_complex = false;
    lo = std::min(lo, std::abs(l));
    hi = std::max(hi, std::abs(l));
  }
  if (all_complex && hi - lo <= tols.tol_modulus * std::max(1.0, hi)) return CausalRelation::Spacelike;
  return CausalRelation::Lightlike;
}

FermionPoint local_correlation(const std::vector<Vector>& spinor_values, const Matrix& spin_gram,
                               const SpinSignature& sig, double rank_tol_scale) {
  const int n = (int)spinor_values.size();
  if (n == 0) throw std::invalid_argument("local_correlation: empty state list");
  const int dy = (int)spin_gram.rows();
  if (spin_gram.cols() != dy) throw std::invalid_argument("local_correlation: spin_gram not square");
  if (util::herm_residual(spin_gram) > kHermTol * std::max(1.0, spin_gram.norm()))
    throw std::invalid_argument("local_correlation: spin_gram not Hermitian");
  if (std::abs(spin_gram.determinant()) < 1e-12)
    throw std::invalid_argument("local_correlation: spin_gram singular");
  for (const auto& v : spinor_values)
    if ((int)v.size() != dy) throw std::invalid_argument("local_correlation: fibre dimension mismatch");

  Matrix f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = -(spinor_values[i].adjoint() * spin_gram * spinor_values[j])(0);
  f = 0.5 * (f + Matrix(f.adjoint()));
  FermionPoint pt(std::move(f), rank_tol_scale);
  if (pt.positive_count() > sig.p || pt.negative_count() > sig.q) {
    std::ostringstream os;
    os << "local_correlation: signature violation, " << pt.positive_count() << " positive / "
       << pt.negative_count() << " negative eigenvalues exceed (" << sig.p << "," << sig.q << ")";
    throw SignatureError(os.str(), pt.eigenvalues());
  }
  return pt;
}

SpinSpace spin_space(const FermionPoint& x) {
  return spin_space(std::make_shared<const FermionPoint>(x));
}

SpinSpace spin_space(std::shared_ptr<const FermionPoint> x) {
  SpinSpace s;
  s.point = std::move(x);
  const auto& ev = s.point->eigenvalues();
  const double tol = s.point->rank_tol();
  std::vector<int> keep;
  bool ambiguous = false;
  for (int i = 0; i < ev.size(); ++i) {
    double a = std::abs(ev(i));
    if (a > tol) keep.push_back(i);
    if (a > tol / 10 && a < tol * 10) ambiguous = true;
  }
  if (ambiguous) s.warnings.push_back("rank ambiguous: eigenvalue near rank_tol band");
  // ascending eigenvalues: spin-positive directions (nu < 0) come first
  const int d = (int)keep.size();
  s.frame.resize(s.point->dim(), d);
  s.eigvals.resize(d);
  s.signs.resize(d);
  for (int k = 0; k < d; ++k) {
    int i = keep[k];
    double nu = ev(i);
    s.eigvals(k) = nu;
    s.signs(k) = nu < 0 ? 1 : -1;
    s.frame.col(k) = s.point->eigenvectors().col(i) / std::sqrt(std::abs(nu));
  }
  return s;
}

SpinSpace spin_space_with_frame(std::shared_ptr<const FermionPoint> x, const Matrix& frame,
                                const RealVector& eigvals, const Eigen::VectorXi& signs,
                                double tol) {
  SpinSpace s;
  s.point = std::move(x);
  s.frame = frame;
  s.eigvals = eigvals;
  s.signs = signs;
  Matrix g = -(frame.adjoint() * (s.point->matrix() * frame));
  if ((g - s.gram()).norm() > tol * std::max(1.0, g.norm()))
    throw std::invalid_argument("spin_space_with_frame: frame not pseudo-orthonormal");
  for (int k = 0; k < s.dim(); ++k) {
    Vector resid = s.point->matrix() * frame.col(k) - eigvals(k) * frame.col(k);
    if (resid.norm() > tol * std::max(1.0, std::abs(eigvals(k))))
      throw std::invalid_argument("spin_space_with_frame: columns are not eigenvectors");
  }
  return s;
}

SpinOperator euclidean_sign(const SpinSpace& s) {
  if (s.dim() < 1) throw std::invalid_argument("euclidean_sign: empty spin space");
  SpinOperator op;
  op.matrix = s.gram();
  op.symmetric_flag = true;
  return op;
}

namespace {
// Frame matrix of the operator word (x * y) restricted to S_x:
// M_ab = s_a <f_a | x y f_b>_x = -s_a (f_a, x x y f_b)_H.
Matrix restricted_product(const FermionPoint& x, const FermionPoint& y, const SpinSpace& sx) {
  Matrix w = x.matrix() * (x.matrix() * (y.matrix() * sx.frame));
  Matrix m = -(sx.frame.adjoint() * w);
  for (int a = 0; a < m.rows(); ++a) m.row(a) *= (double)sx.signs(a);
  return m;
}
}  // namespace

CausalSpectrum causal_classify(const FermionPoint& x, const FermionPoint& y, const CausalTols& tols) {
  CausalSpectrum out;
  out.tols = tols;
  SpinSpace sx = spin_space(std::make_shared<const FermionPoint>(x));
  const int d = sx.dim();
  if (d == 0) {
    out.relation = CausalRelation::Lightlike;
    out.empty_warning = true;
    return out;
  }
  Matrix m = restricted_product(x, y, sx);
  Eigen::ComplexEigenSolver<Matrix> es(m);
  double scale = std::max(1.0, m.norm());
  int nonzero = 0;
  for (int i = 0; i < d; ++i) {
    cplx l = es.eigenvalues()(i);
    out.lambdas.push_back(l);
    if (std::abs(l) > 1e-12 * scale) ++nonzero;
  }
  out.rank_deficit = std::max(0, d - nonzero);
  if (nonzero == 0) {
    out.relation = CausalRelation::Lightlike;
    out.empty_warning = true;
    return out;
  }
  std::vector<cplx> nz;
  for (const auto& l : out.lambdas)
    if (std::abs(l) > 1e-12 * scale) nz.push_back(l);
  out.relation = classify_lambdas(nz, tols);
  return out;
}

bool riemannian_spectrum_check(const FermionPoint& x, const FermionPoint& y, double tol) {
  CausalSpectrum cs = causal_classify(x, y);
  double scale = 1.0;
  for (const auto& l : cs.lambdas) scale = std::max(scale, std::abs(l));
  for (const auto& l : cs.lambdas) {
    if (std::abs(l.imag()) > tol * scale) return false;
    if (l.real() < -tol * scale) return false;
  }
  return true;
}

KernelMatrix kernel(const SpinSpace& sx, const SpinSpace& sy) {
  // P(x,y)_ab = s_a <f_a(x) | y f_b(y)>_x = -s_a (f_a(x), x y f_b(y))_H
  KernelMatrix k;
  const Matrix& xm = sx.point->matrix();
  const Matrix& ym = sy.point->matrix();
  Matrix m = -(sx.frame.adjoint() * (xm * (ym * sy.frame)));
  for (int a = 0; a < m.rows(); ++a) m.row(a) *= (double)sx.signs(a);
  k.matrix = std::move(m);
  k.signs_source = sy.signs;
  k.signs_target = sx.signs;
  return k;
}

SpinOperator closed_chain(const SpinSpace& sx, const SpinSpace& sy) {
  SpinOperator a;
  a.matrix = kernel(sx, sy).matrix * kernel(sy, sx).matrix;
  a.symmetric_flag = is_spin_symmetric(a.matrix, sx.signs);
  return a;
}

Matrix operator_sqrt(const Matrix& t) {
  const int d = (int)t.rows();
  Matrix delta = t - Matrix::Identity(d, d);
  if (delta.norm() < 0.5) {
    // sqrt(1 + D) power series
    Matrix term = Matrix::Identity(d, d), sum = Matrix::Identity(d, d);
    double coeff = 1.0;
    for (int k = 1; k < 80; ++k) {
      coeff *= (1.5 - k) / k;  // binomial(1/2, k) recurrence
      term = term * delta;
      sum += coeff * term;
      if (term.norm() * std::abs(coeff) < 1e-16 * sum.norm()) break;
    }
    return sum;
  }
  Eigen::ComplexEigenSolver<Matrix> es(t);
  Matrix v = es.eigenvectors();
  Vector lam = es.eigenvalues();
  Matrix s = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) s(i, i) = std::sqrt(lam(i));
  return v * s * v.inverse();
}

Matrix transport(const SpinSpace& sx, const SpinSpace& sy) {
  // pi_x|S_y in frames: Q_ab = s_a <f_a(x)|f_b(y)>_x = -s_a (f_a(x), x f_b(y))_H
  const Matrix& xm = sx.point->matrix();
  Matrix q = -(sx.frame.adjoint() * (xm * sy.frame));
  for (int a = 0; a < q.rows(); ++a) q.row(a) *= (double)sx.signs(a);
  Matrix qs = spin_adjoint(q, sy.signs, sx.signs);
  Matrix t = q * qs;
  double cond = std::abs(t.determinant());
  if (cond < 1e-14 * std::pow(std::max(t.norm(), 1e-30), t.rows()))
    throw std::runtime_error("transport: points not transport-connectable (T singular)");
  Matrix rho = operator_sqrt(t);
  return rho.inverse() * q;
}

}  // namespace cfl::opcore
