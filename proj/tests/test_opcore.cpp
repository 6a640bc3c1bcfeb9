#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cfl/opcore.hpp"
#include "cfl/util.hpp"
#include "doctest.h"

using namespace cfl;
using namespace cfl::opcore;

namespace {

Matrix pauli(int i) {
  switch (i) {
    case 1: return mats::sigma1();
    case 2: return mats::sigma2();
    default: return mats::sigma3();
  }
}

FermionPoint sphere_point(const Eigen::Vector3d& p) {
  Matrix f = 2.0 * (p(0) * pauli(1) + p(1) * pauli(2) + p(2) * pauli(3)) + Matrix::Identity(2, 2);
  return FermionPoint(std::move(f));
}

// brute-force characteristic roots of a 2x2 matrix
std::pair<cplx, cplx> roots2(const Matrix& m) {
  cplx tr = m(0, 0) + m(1, 1);
  cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  cplx disc = std::sqrt(tr * tr - 4.0 * det);
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

bool contains_close(const std::vector<cplx>& v, cplx z, double tol) {
  for (const auto& x : v)
    if (std::abs(x - z) < tol) return true;
  return false;
}

}  // namespace

TEST_CASE("FermionPoint validates hermiticity and counts signature") {
  Matrix bad(2, 2);
  bad << 1, cplx(0, 1), cplx(0, 1), 1;  // not Hermitian
  CHECK_THROWS(FermionPoint(bad));

  FermionPoint x = sphere_point({0, 0, 1});
  CHECK(x.positive_count() == 1);
  CHECK(x.negative_count() == 1);
  CHECK(x.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(x.eigenvalues()(1) == doctest::Approx(3.0));
}

TEST_CASE("local_correlation reproduces the Dirac-sphere operator") {
  // psi_i built from F(p): choose A with A^dagger S A = -F(p), S = diag(1,-1)
  Eigen::Vector3d p(0, 0, 1);
  Matrix f = 2.0 * pauli(3) + Matrix::Identity(2, 2);  // diag(3,-1)
  // -F = diag(-3, 1): realize with S = diag(1,-1): A = diag(1, sqrt(3)) on swapped axes
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1;
  s(1, 1) = -1;
  std::vector<Vector> psi(2, Vector(2));
  psi[0] << 0, std::sqrt(3.0);  // -<psi0|psi0>_S = -(0,sqrt3) S (0,sqrt3) = +3
  psi[1] << 1, 0;               // -<psi1|psi1>_S = -1
  FermionPoint x = local_correlation(psi, s, SpinSignature(1, 1));
  CHECK((x.matrix() - f).norm() < 1e-12);

  // signature violation: two positive directions in a (1,1) system
  std::vector<Vector> bad(2, Vector(2));
  bad[0] << 0, 1;
  bad[1] << 0.5, 1;
  CHECK_THROWS_AS(local_correlation(bad, s, SpinSignature(0, 1)), SignatureError);

  // all values zero -> zero operator, rank 0
  std::vector<Vector> zero(3, Vector::Zero(2));
  FermionPoint z = local_correlation(zero, s, SpinSignature(1, 1));
  CHECK(z.matrix().norm() == 0.0);
  CHECK(spin_space(z).dim() == 0);
}

TEST_CASE("spin_space frame is pseudo-orthonormal") {
  FermionPoint x = sphere_point({0.3, -0.5, std::sqrt(1 - 0.09 - 0.25)});
  SpinSpace s = spin_space(x);
  REQUIRE(s.dim() == 2);
  // signs ordered +1 first (nu ascending)
  CHECK(s.signs(0) == 1);
  CHECK(s.signs(1) == -1);
  // <f_a|f_b> = -(f_a, x f_b) = s_a delta_ab
  Matrix g = -(s.frame.adjoint() * x.matrix() * s.frame);
  CHECK((g - s.gram()).norm() < 1e-10);
}

TEST_CASE("spin_space of diag(3,-1)") {
  Matrix f(2, 2);
  f << 3, 0, 0, -1;
  SpinSpace s = spin_space(FermionPoint(f));
  CHECK(s.dim() == 2);
  CHECK(s.eigvals(0) == doctest::Approx(-1.0));
  CHECK(s.eigvals(1) == doctest::Approx(3.0));
  CHECK(s.signs(0) == 1);
  CHECK(s.signs(1) == -1);
}

TEST_CASE("rank-ambiguity warning band") {
  Matrix f = Matrix::Zero(2, 2);
  f(0, 0) = 1.0;
  f(1, 1) = 3e-9;  // rank_tol = 1e-9 * ||f|| ~ 1e-9: inside (tol/10, tol*10)
  SpinSpace s = spin_space(FermionPoint(f));
  CHECK(!s.warnings.empty());
}

TEST_CASE("euclidean_sign") {
  Matrix f(2, 2);
  f << -2, 0, 0, -0.5;  // Riemannian point
  SpinSpace s = spin_space(FermionPoint(f));
  SpinOperator sx = euclidean_sign(s);
  CHECK((sx.matrix - Matrix::Identity(2, 2)).norm() < 1e-14);

  FermionPoint x = sphere_point({0, 0, 1});
  SpinSpace sc = spin_space(x);
  Matrix expect(2, 2);
  expect << 1, 0, 0, -1;
  CHECK((euclidean_sign(sc).matrix - expect).norm() < 1e-14);

  SpinSpace empty = spin_space(FermionPoint(Matrix::Zero(2, 2)));
  CHECK_THROWS(euclidean_sign(empty));
}

TEST_CASE("causal classification on the Dirac sphere") {
  FermionPoint north = sphere_point({0, 0, 1});
  FermionPoint south = sphere_point({0, 0, -1});
  FermionPoint equator = sphere_point({1, 0, 0});

  // brute-force oracle: diag(3,-1) * diag(-1,3) = diag(-3,-3)
  CausalSpectrum ts = causal_classify(north, south);
  CHECK(ts.relation == CausalRelation::Timelike);
  CHECK(contains_close(ts.lambdas, cplx(-3, 0), 1e-10));

  // oracle: lambda^2 - 2 lambda + 9 = 0 -> 1 +- 2 sqrt2 i, |lambda| = 3
  auto [r1, r2] = roots2(north.matrix() * equator.matrix());
  CausalSpectrum sp = causal_classify(north, equator);
  CHECK(sp.relation == CausalRelation::Spacelike);
  CHECK(contains_close(sp.lambdas, r1, 1e-10));
  CHECK(contains_close(sp.lambdas, r2, 1e-10));
  CHECK(std::abs(std::abs(sp.lambdas[0]) - 3.0) < 1e-10);

  // x = y: spectrum {nu^2} real
  CausalSpectrum self = causal_classify(north, north);
  CHECK(self.relation == CausalRelation::Timelike);
  CHECK(contains_close(self.lambdas, cplx(9, 0), 1e-10));
  CHECK(contains_close(self.lambdas, cplx(1, 0), 1e-10));
}

TEST_CASE("classification is symmetric in (x,y) on random pairs") {
  auto gen = util::rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = util::random_hermitian(4, gen), b = util::random_hermitian(4, gen);
    FermionPoint x(a), y(b);
    CausalSpectrum xy = causal_classify(x, y), yx = causal_classify(y, x);
    CHECK(xy.relation == yx.relation);
    double scale = 1.0;
    for (auto& l : xy.lambdas) scale = std::max(scale, std::abs(l));
    for (const auto& l : xy.lambdas) {
      if (std::abs(l) < 1e-10 * scale) continue;
      CHECK(contains_close(yx.lambdas, l, 1e-8 * scale));
    }
  }
}

TEST_CASE("riemannian products have real nonnegative spectrum") {
  auto gen = util::rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix a = util::random_hermitian(5, gen);
    Matrix b = util::random_hermitian(5, gen);
    // negative semidefinite rank-2 points
    auto riem = [&](Matrix m) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(m);
      Matrix v = es.eigenvectors().leftCols(2);
      Matrix d = Matrix::Zero(2, 2);
      d(0, 0) = -std::abs(es.eigenvalues()(0)) - 0.1;
      d(1, 1) = -std::abs(es.eigenvalues()(1)) - 0.2;
      return Matrix(v * d * v.adjoint());
    };
    FermionPoint x(riem(a)), y(riem(b));
    CHECK(riemannian_spectrum_check(x, y));
  }
}

TEST_CASE("kernel: diagonal at coincidence, spin adjoint relation") {
  FermionPoint x = sphere_point({0.2, 0.1, std::sqrt(1 - 0.05)});
  FermionPoint y = sphere_point({-0.4, 0.2, std::sqrt(1 - 0.2)});
  SpinSpace sx = spin_space(x), sy = spin_space(y);

  KernelMatrix pxx = kernel(sx, sx);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = sx.eigvals(0);
  d(1, 1) = sx.eigvals(1);
  CHECK((pxx.matrix - d).norm() < 1e-10);

  KernelMatrix pxy = kernel(sx, sy), pyx = kernel(sy, sx);
  Matrix adj = spin_adjoint(pyx.matrix, sy.signs, sx.signs);
  CHECK((pxy.matrix - adj).norm() < 1e-10 * std::max(1.0, pxy.matrix.norm()));
}

TEST_CASE("kernel of orthogonal images vanishes") {
  Matrix a = Matrix::Zero(4, 4), b = Matrix::Zero(4, 4);
  a(0, 0) = 2.0;
  a(1, 1) = -1.0;
  b(2, 2) = 1.5;
  b(3, 3) = -2.5;
  SpinSpace sa = spin_space(FermionPoint(a)), sb = spin_space(FermionPoint(b));
  CHECK(kernel(sa, sb).matrix.norm() < 1e-14);
}

TEST_CASE("closed chain spectrum equals the causal roots") {
  auto gen = util::rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    Matrix a = util::random_hermitian(4, gen), b = util::random_hermitian(4, gen);
    FermionPoint x(a), y(b);
    SpinSpace sx = spin_space(x), sy = spin_space(y);
    SpinOperator chain = closed_chain(sx, sy);
    CHECK(is_spin_symmetric(chain.matrix, sx.signs, 1e-9));
    Eigen::ComplexEigenSolver<Matrix> es(chain.matrix);
    CausalSpectrum cs = causal_classify(x, y);
    double scale = std::max(1.0, chain.matrix.norm());
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      CHECK(contains_close(cs.lambdas, es.eigenvalues()(i), 1e-8 * scale));
  }
}

TEST_CASE("transport is unitary and trivial at coincidence") {
  FermionPoint x = sphere_point({0, 0, 1});
  SpinSpace sx = spin_space(x);
  CHECK((transport(sx, sx) - Matrix::Identity(2, 2)).norm() < 1e-12);

  auto gen = util::rng(3);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::Vector3d p(ud(gen), ud(gen), ud(gen));
    p.normalize();
    Eigen::Vector3d q = p + 0.2 * Eigen::Vector3d(ud(gen), ud(gen), ud(gen));
    q.normalize();
    SpinSpace sp = spin_space(sphere_point(p)), sq = spin_space(sphere_point(q));
    Matrix u = transport(sp, sq);
    Matrix uu = u * spin_adjoint(u, sq.signs, sp.signs);
    CHECK((uu - Matrix::Identity(2, 2)).norm() < 1e-10);
  }
}

TEST_CASE("transport composition defect is second order in the separation") {
  // U_{x,y} U_{y,x} = 1 + O(||x-y||^2); for the pair itself the defect is in
  // fact exact, the quadratic defect shows up as three-point loop holonomy.
  Eigen::Vector3d p(0, 0, 1);
  auto pair_defect = [&](double h) {
    Eigen::Vector3d q(std::sin(h), 0, std::cos(h));
    SpinSpace sp = spin_space(sphere_point(p)), sq = spin_space(sphere_point(q));
    return (transport(sp, sq) * transport(sq, sp) - Matrix::Identity(2, 2)).norm();
  };
  CHECK(pair_defect(0.2) < 1e-12);
  CHECK(pair_defect(0.05) < 1e-12);

  auto loop_defect = [&](double h) {
    Eigen::Vector3d q(std::sin(h), 0, std::cos(h));
    Eigen::Vector3d r(0, std::sin(h), std::cos(h));
    SpinSpace sp = spin_space(sphere_point(p));
    SpinSpace sq = spin_space(sphere_point(q));
    SpinSpace sr = spin_space(sphere_point(r));
    return (transport(sp, sq) * transport(sq, sr) * transport(sr, sp) - Matrix::Identity(2, 2))
        .norm();
  };
  double d1 = loop_defect(0.2), d2 = loop_defect(0.1), d4 = loop_defect(0.05);
  CHECK(std::log2(d1 / d2) > 1.7);
  CHECK(std::log2(d2 / d4) > 1.7);
}

TEST_CASE("operator_sqrt series and eigen branches agree") {
  auto gen = util::rng(19);
  Matrix h = util::random_hermitian(3, gen);
  Matrix t = Matrix::Identity(3, 3) + 0.3 * h / h.norm();
  Matrix s = operator_sqrt(t);
  CHECK((s * s - t).norm() < 1e-12);
  Matrix t2 = Matrix::Identity(3, 3) + 2.0 * (h * h) / (h * h).norm();
  Matrix s2 = operator_sqrt(t2);
  CHECK((s2 * s2 - t2).norm() < 1e-10);
}

TEST_CASE("classify_lambdas edge conventions") {
  CausalTols tols;
  CHECK(classify_lambdas({}, tols) == CausalRelation::Lightlike);
  CHECK(classify_lambdas({cplx(1, 0), cplx(2, 0)}, tols) == CausalRelation::Timelike);
  CHECK(classify_lambdas({cplx(1, 1), cplx(1, -1)}, tols) == CausalRelation::Spacelike);
  CHECK(classify_lambdas({cplx(1, 1), cplx(3, 0)}, tols) == CausalRelation::Lightlike);
  CHECK(classify_lambdas({cplx(1, 1), cplx(2, -1)}, tols) == CausalRelation::Lightlike);
}
