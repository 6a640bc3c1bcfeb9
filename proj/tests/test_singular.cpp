#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cfl/singular.hpp"
#include "cfl/util.hpp"
#include "doctest.h"

using namespace cfl;
using namespace cfl::singular;

namespace {

Matrix sigma_r(double phi) {
  return Matrix(std::cos(phi) * mats::sigma1() + std::sin(phi) * mats::sigma2());
}
Matrix sigma_phi(double phi) {
  return Matrix(-std::sin(phi) * mats::sigma1() + std::cos(phi) * mats::sigma2());
}

DiagonalMetric polar_metric(std::function<double(double)> radius) {
  DiagonalMetric m;
  m.dim = 2;
  m.sign_pattern.resize(2);
  m.sign_pattern << 1, 1;
  m.coeffs = {[](const RealVector&) { return 1.0; },
              [radius](const RealVector& p) { return radius(p(0)) * radius(p(0)); }};
  return m;
}

std::vector<FrameFn> polar_frames(std::function<double(double)> radius) {
  return {[](const RealVector& p) { return sigma_r(p(1)); },
          [radius](const RealVector& p) { return Matrix(sigma_phi(p(1)) / radius(p(0))); }};
}

}  // namespace

TEST_CASE("dirac_coefficients: flat plane in the rotated polar frame has B = 0") {
  auto radius = [](double r) { return r; };
  DiagonalMetric m = polar_metric(radius);
  RealVector p(2);
  p << 1.3, 0.7;
  DiracCoefficients dc = dirac_coefficients(m, polar_frames(radius), p);
  CHECK(dc.anticommutation_residual < 1e-8);
  CHECK(dc.B.norm() < 1e-8);
}

TEST_CASE("dirac_coefficients: conical chart B = -(i/2r) sigma^r") {
  auto radius = [](double r) { return 0.5 * r; };
  DiagonalMetric m = polar_metric(radius);
  RealVector p(2);
  p << 0.9, -0.4;
  DiracCoefficients dc = dirac_coefficients(m, polar_frames(radius), p);
  Matrix expect = cplx(0, -0.5 / p(0)) * sigma_r(p(1));
  CHECK((dc.B - expect).norm() < 1e-8);
}

TEST_CASE("dirac_coefficients: neck cylinder B = (i Rdot / 2R) sigma3") {
  double eps = 0.1;
  DiagonalMetric m;
  m.dim = 2;
  m.sign_pattern.resize(2);
  m.sign_pattern << 1, -1;
  m.coeffs = {[](const RealVector&) { return 1.0; },
              [eps](const RealVector& p) { return std::sqrt(p(0) * p(0) + eps * eps); }};
  std::vector<FrameFn> frames = {
      [](const RealVector&) { return Matrix(mats::sigma3()); },
      [eps](const RealVector& p) {
        return Matrix(cplx(0, 1) * mats::sigma1() / neck_radius(p(0), eps));
      }};
  RealVector p(2);
  p << 0.4, 1.0;
  DiracCoefficients dc = dirac_coefficients(m, frames, p);
  double r = neck_radius(p(0), eps);
  double rdot = 0.5 * p(0) / (r * r * r);  // d/dt (t^2+eps^2)^(1/4)
  Matrix expect = cplx(0, 0.5 * rdot / r) * mats::sigma3();
  CHECK(dc.anticommutation_residual < 1e-8);
  CHECK((dc.B - expect).norm() < 1e-7);
}

TEST_CASE("dirac_coefficients: constant metric gives B = 0; bad points rejected") {
  DiagonalMetric m;
  m.dim = 2;
  m.sign_pattern.resize(2);
  m.sign_pattern << 1, 1;
  m.coeffs = {[](const RealVector&) { return 2.0; }, [](const RealVector&) { return 3.0; }};
  std::vector<FrameFn> frames = {
      [](const RealVector&) { return Matrix(mats::sigma1() / std::sqrt(2.0)); },
      [](const RealVector&) { return Matrix(mats::sigma2() / std::sqrt(3.0)); }};
  RealVector p = RealVector::Zero(2);
  DiracCoefficients dc = dirac_coefficients(m, frames, p);
  CHECK(dc.B.norm() < 1e-12);
  CHECK(dc.anticommutation_residual < 1e-12);

  DiagonalMetric bad = m;
  bad.coeffs[0] = [](const RealVector& q) { return q(0); };  // <= 0 at 0
  CHECK_THROWS(dirac_coefficients(bad, frames, p));
}

TEST_CASE("anticommutation residual at random chart points") {
  auto radius = [](double r) { return 0.5 * r; };
  DiagonalMetric m = polar_metric(radius);
  auto frames = polar_frames(radius);
  auto gen = util::rng(12);
  std::uniform_real_distribution<double> ur(0.2, 3.0), uphi(0, 2 * M_PI);
  for (int i = 0; i < 100; ++i) {
    RealVector p(2);
    p << ur(gen), uphi(gen);
    CHECK(dirac_coefficients(m, frames, p).anticommutation_residual < 1e-8);
  }
}

TEST_CASE("integrate_mode: zero rhs, analytic diagonal neck solution, conservation") {
  Vector init(2);
  init << 0.6, cplx(0, 0.8);

  RadialSolution zero = integrate_mode([](double) { return Matrix(Matrix::Zero(2, 2)); }, 0, 1,
                                       init, 64);
  CHECK((zero.values.back() - init).norm() < 1e-15);

  // k = 0: decoupled phases e^{-+ i m t}
  double m = 1.3;
  RadialSolution sol = integrate_mode(neck_rhs(0.0, m, 0.1), -2, 2, init, 1 << 12);
  Vector expect(2);
  expect << init(0) * std::exp(cplx(0, -m * 4.0)), init(1) * std::exp(cplx(0, m * 4.0));
  CHECK((sol.values.back() - expect).norm() < 1e-8);
  CHECK(sol.max_norm_drift() < 1e-10);

  // Schwarzschild omega = 0, m = 0: real antisymmetric generator
  SchwarzschildParams par;
  ModeSpec mode;
  mode.omega = 0;
  mode.lambda_sep = 1;
  mode.k_half = 0.5;
  mode.m_mass = 0;
  RadialSolution schw = schwarzschild_radial(par, mode, 0.01, 1.9, 1 << 13, init);
  CHECK(schw.max_norm_drift() < 1e-10);
}

TEST_CASE("neck: norm conservation, Gronwall bound, epsilon ladder shrinks") {
  Vector init(2);
  init << 1.0, 0.0;
  std::vector<double> eps = {0.1, 0.05, 0.025};
  std::vector<RadialSolution> sols;
  for (double e : eps) sols.push_back(integrate_mode(neck_rhs(1.0, 1.0, e), -2, 2, init, 1 << 14));
  for (const auto& s : sols) CHECK(s.max_norm_drift() < 1e-8);

  for (size_t i = 0; i < eps.size(); ++i) {
    double lhs = (sols[i].values.back() - sols[i].values.front()).norm();
    CHECK(lhs <= neck_gronwall_bound(1.0, 1.0, eps[i], -2, 2, 1.0) + 1e-9);
  }

  double d1 = sup_difference(sols[0], sols[1]);
  double d2 = sup_difference(sols[1], sols[2]);
  CHECK(d2 < d1);  // shrinking along the ladder
}

TEST_CASE("torus x S1: conservation and ladder convergence in the warped coefficient") {
  Vector init(2);
  init << 1.0, 0.0;
  std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};
  std::vector<RadialSolution> sols;
  for (double e : eps)
    sols.push_back(integrate_mode(torus_s1_rhs(0.0, 1.0, 1.0, e), -2, 2, init, 1 << 14));
  for (const auto& s : sols) CHECK(s.max_norm_drift() < 1e-8);
  double d1 = sup_difference(sols[0], sols[1]);
  double d2 = sup_difference(sols[1], sols[2]);
  double d3 = sup_difference(sols[2], sols[3]);
  CHECK(d2 / d1 < 0.6);
  CHECK(d3 / d2 < 0.6);

  // k = l = 0 decouples into pure phases
  RadialSolution dec = integrate_mode(torus_s1_rhs(0, 0, 0.7, 0.1), -2, 2, init, 1 << 12);
  CHECK(std::abs(std::abs(dec.values.back()(0)) - 1.0) < 1e-10);
}

TEST_CASE("cone: explicit solutions solve the radial system exactly") {
  for (int which : {+1, -1, 3}) {
    double k = which == 3 ? 1.5 : 0.5 * which;
    auto rhs = cone_rhs(1.0, k);
    for (double r = 0.05; r <= 5.0; r += 0.11) {
      Vec2 chi = cone_chi(r, which);
      Vec2 lhs = cone_chi_deriv(r, which);
      Vec2 rv = (rhs(r) * Vector(chi)).head<2>();
      CHECK((lhs - rv).norm() < 1e-8 * std::max(1.0, chi.norm()));
    }
  }
}

TEST_CASE("cone: correlation operators, F(pi), rescaled limit") {
  // F diagonal with the scalar formula
  for (double r : {0.3, 1.0, 2.5}) {
    Vec2 pp = cone_psi_plus(r, 0.7), pm = cone_psi_minus(r, 0.7);
    CHECK(std::abs(-(pp.adjoint() * pp)(0).real() - cone_F_scalar(r)) < 1e-12);
    CHECK(std::abs((pp.adjoint() * pm)(0)) < 1e-12);
  }
  CHECK(cone_F_scalar(M_PI) == doctest::Approx(-1.0 / M_PI).epsilon(1e-12));

  // F~ = F / r extends to r = 0 with limit -id
  for (double r : {1e-2, 1e-3, 1e-4}) {
    double ft = cone_F_scalar(r) / r;
    CHECK(std::abs(ft + 1.0) < 10 * r * r + 1e-10);
  }
  Matrix f = cone_F_scalar(1.0) * Matrix::Identity(2, 2);
  Matrix ft = rescale_correlation(f, 1.0 / 1.0);
  CHECK((ft - f).norm() == 0.0);
  CHECK_THROWS(rescale_correlation(f, -1.0));
}

TEST_CASE("cone: third wave function makes the rescaled map injective on a grid") {
  std::vector<Matrix> ops;
  std::vector<std::pair<double, double>> pts;
  for (double r : {0.4, 0.8, 1.2, 1.6})
    for (double phi : {0.0, 1.0, 2.0, 3.0, 4.5}) {
      ops.push_back(Matrix(cone_F3(r, phi) / r));
      pts.push_back({r, phi});
    }
  double minsep = 1e300;
  for (size_t i = 0; i < ops.size(); ++i)
    for (size_t j = i + 1; j < ops.size(); ++j) minsep = std::min(minsep, (ops[i] - ops[j]).norm());
  CHECK(minsep > 1e-3);

  // without the third state, distinct angles collapse (F diagonal, phi-free)
  Matrix f2a = cone_F_scalar(0.8) * Matrix::Identity(2, 2);
  Matrix f2b = cone_F_scalar(0.8) * Matrix::Identity(2, 2);
  CHECK((f2a - f2b).norm() < 1e-15);
}

TEST_CASE("cone x S1: corrected closed forms solve the system; F limit") {
  for (int sign : {+1, -1}) {
    auto rhs = cone_s1_rhs(1.0, 0.5 * sign, 1.0);
    for (double r = 0.05; r <= 5.0; r += 0.07) {
      Vec2 chi = cone_s1_chi(r, sign);
      Vec2 lhs = cone_s1_chi_deriv(r, sign);
      Vec2 rv = (rhs(r) * Vector(chi)).head<2>();
      CHECK((lhs - rv).norm() < 1e-8 * std::max(1.0, chi.norm()));
    }
  }

  // limit matrix: Hermitian, rank 2, diag 5, offdiag modulus 4, constant in phi
  for (double phi : {0.0, 0.9, 2.2, 5.1}) {
    Mat2 lim = cone_s1_F_limit(phi);
    Mat2 f = cone_s1_F(1e-4, phi);
    CHECK((f - lim).norm() < 1e-5);
    CHECK(std::abs(std::abs(f(0, 1)) - 4.0) < 1e-6);
    CHECK(std::abs(f(0, 0).real() + 5.0) < 1e-6);
    Eigen::SelfAdjointEigenSolver<Mat2> es(lim);
    CHECK(std::abs(es.eigenvalues()(0) + 9.0) < 1e-12);
    CHECK(std::abs(es.eigenvalues()(1) + 1.0) < 1e-12);
  }

  // the limit operator is negative semidefinite in this sign convention while
  // the reference display carries positive entries; moduli agree entrywise
  Mat2 lim = cone_s1_F_limit(0.3);
  CHECK(lim(0, 0).real() < 0);
}

TEST_CASE("schwarzschild: mode validation and current conservation") {
  ModeSpec good;
  good.lambda_sep = 2;
  good.k_half = 1.5;
  CHECK_NOTHROW(validate_schwarzschild_mode(good));
  ModeSpec bad1 = good;
  bad1.k_half = 2.5;
  CHECK_THROWS(validate_schwarzschild_mode(bad1));
  ModeSpec bad2 = good;
  bad2.lambda_sep = 0;
  CHECK_THROWS(validate_schwarzschild_mode(bad2));
  ModeSpec bad3 = good;
  bad3.k_half = 1.0;  // not a half-integer
  CHECK_THROWS(validate_schwarzschild_mode(bad3));

  SchwarzschildParams par;
  Vector init(2);
  init << 1.0, cplx(0, 0.5);
  init /= init.norm();
  for (double omega : {0.0, 1.0})
    for (int lam : {1, -1, 2}) {
      ModeSpec mode;
      mode.omega = omega;
      mode.lambda_sep = lam;
      mode.k_half = 0.5;
      mode.m_mass = 0.1;
      RadialSolution sol = schwarzschild_radial(par, mode, 0.01, 1.9, 1 << 14, init);
      CHECK(sol.max_norm_drift() < 1e-6);
    }

  // halving check: doubled steps agree
  ModeSpec mode;
  mode.omega = 1.0;
  mode.lambda_sep = 1;
  mode.k_half = 0.5;
  mode.m_mass = 0.1;
  RadialSolution a = schwarzschild_radial(par, mode, 0.05, 1.5, 1 << 12, init);
  RadialSolution b = schwarzschild_radial(par, mode, 0.05, 1.5, 1 << 13, init);
  CHECK((a.values.back() - b.values.back()).norm() < 1e-9);

  // horizon-touching interval rejected
  CHECK_THROWS(schwarzschild_radial(par, mode, 0.01, 1.999, 1 << 10, init));
  CHECK_THROWS(schwarzschild_radial(par, mode, -0.1, 1.0, 1 << 10, init));
}

TEST_CASE("schwarzschild: continuity at r -> 0 via left-endpoint ladder") {
  SchwarzschildParams par;
  ModeSpec mode;
  mode.omega = 1.0;
  mode.lambda_sep = 1;
  mode.k_half = 0.5;
  mode.m_mass = 0.1;
  Vector init(2);
  init << 1.0, 0.0;
  std::vector<double> lows = {0.01, 0.005, 0.0025, 0.00125};
  std::vector<Vector> ends;
  for (double lo : lows)
    ends.push_back(schwarzschild_radial(par, mode, lo, 1.0, 1 << 13, init).values.back());
  double d1 = (ends[1] - ends[0]).norm();
  double d2 = (ends[2] - ends[1]).norm();
  double d3 = (ends[3] - ends[2]).norm();
  CHECK(d2 < d1);
  CHECK(d3 < d2);
  CHECK(d3 < 1e-2);
}

TEST_CASE("schwarzschild: rescaled correlations bounded as r -> 0") {
  // |X| is conserved, so r^{3/2} <Psi|Phi> ~ X-overlaps stay bounded: check the
  // separated-solution prefactor cancellation numerically
  SchwarzschildParams par;
  ModeSpec mode;
  mode.omega = 0.7;
  mode.lambda_sep = 1;
  mode.k_half = 0.5;
  mode.m_mass = 0.1;
  Vector init(2);
  init << 0.8, cplx(0.0, 0.6);
  RadialSolution sol = schwarzschild_radial(par, mode, 1e-4, 1.0, 1 << 13, init);
  // prefactor |Delta|^{-1/4} r^{-1/2}: the rescaled product r^{3/2} |psi|^2 =
  // r^{3/2} |X|^2 / (sqrt|Delta| r) -> |X|^2 / sqrt(2M) as r -> 0
  for (int i = 0; i < sol.grid.size(); ++i) {
    double r = sol.grid(i);
    double delta = std::abs(r * r - 2 * par.bh_mass * r);
    double rescaled = std::pow(r, 1.5) * sol.values[i].squaredNorm() / (std::sqrt(delta) * r);
    CHECK(rescaled < 2.0);
    CHECK(rescaled > 0.1);
  }
}

TEST_CASE("schwarzschild packet rides t - u at unit speed") {
  SchwarzschildParams par;
  RealVector times(4);
  times << 0.0, 0.2, 0.4, 0.6;
  PacketResult pr =
      schwarzschild_packet(par, 0.1, 1, 0.5, 40.0, 4.0, 81, 1.65, 0.05, 1.9, times, 3000);
  CHECK(std::abs(pr.slope - 1.0) < 0.05);
}

TEST_CASE("conformal rescale") {
  std::vector<Vector> vals(3, Vector::Ones(2));
  RealVector f(3);
  f << 1.0, 4.0, 9.0;
  auto id = conformal_rescale(vals, RealVector::Ones(3), 3);
  for (const auto& v : id) CHECK((v - Vector::Ones(2)).norm() == 0.0);
  auto sc = conformal_rescale(vals, f, 3);  // power (k-1)/2 = 1
  CHECK(std::abs(sc[1](0).real() - 4.0) < 1e-15);
  CHECK(std::abs(sc[2](0).real() - 9.0) < 1e-15);

  // neck F~ = R F stays bounded while F ~ 1/R diverges on the ladder
  Vector init(2);
  init << 1.0, 0.0;
  for (double eps : {0.1, 0.05, 0.025}) {
    RadialSolution sol = integrate_mode(neck_rhs(1, 1, eps), -2, 0, init, 1 << 12);
    double r0 = neck_radius(0.0, eps);
    // fibre value at the neck: psi ~ chi / sqrt(R)
    double fnorm = sol.values.back().squaredNorm() / r0;   // ~ F scale
    double ftnorm = r0 * fnorm;                            // rescaled
    CHECK(ftnorm < 1.5);
    CHECK(fnorm > 1.0 / std::sqrt(0.11));
  }
}
