#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cfl/clifford.hpp"
#include "cfl/util.hpp"
#include "doctest.h"

using namespace cfl;
using namespace cfl::clifford;

namespace {
Eigen::VectorXi riem_signs() {
  Eigen::VectorXi s(2);
  s << 1, 1;
  return s;
}
Eigen::VectorXi causal_signs() {
  Eigen::VectorXi s(2);
  s << 1, -1;
  return s;
}
}  // namespace

TEST_CASE("check_clifford signatures") {
  CliffordSubspace riem = check_clifford({mats::sigma1(), mats::sigma2()}, riem_signs());
  CHECK(riem.sig_pos == 2);
  CHECK(riem.sig_neg == 0);

  CliffordSubspace lor = check_clifford({mats::gamma0(), mats::gamma2()}, causal_signs());
  CHECK(lor.sig_pos == 1);
  CHECK(lor.sig_neg == 1);

  CHECK_THROWS(check_clifford({mats::sigma1(), mats::sigma1()}, riem_signs()));  // degenerate
  // sigma1 + a non-scalar anticommutator partner
  Matrix bad(2, 2);
  bad << 1, 0.2, 0.2, 0.5;
  CHECK_THROWS(check_clifford({mats::sigma1(), bad}, riem_signs()));
}

TEST_CASE("signature stable under basis recombination") {
  auto gen = util::rng(21);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    RealMatrix a(2, 2);
    a << nd(gen), nd(gen), nd(gen), nd(gen);
    if (std::abs(a.determinant()) < 0.1) continue;
    std::vector<Matrix> basis = {a(0, 0) * mats::gamma0() + a(1, 0) * mats::gamma2(),
                                 a(0, 1) * mats::gamma0() + a(1, 1) * mats::gamma2()};
    CliffordSubspace k = check_clifford(basis, causal_signs());
    CHECK(k.sig_pos == 1);
    CHECK(k.sig_neg == 1);
  }
}

TEST_CASE("extension family members contain s_x and pass the checks") {
  ExtensionFamily fam = extension_family_from_signs(causal_signs());
  CHECK(fam.kind == FamilyKind::CausalExtension);
  for (int i = 0; i < 64; ++i) {
    RealVector p(1);
    p << 2 * M_PI * i / 64.0;
    CliffordSubspace k = fam.member(p);
    CHECK(k.sig_pos == 1);
    CHECK(k.sig_neg == 1);
    // contains the Euclidean sign operator gamma0 = diag(signs)
    CHECK(subspace_distance({k.basis[0]}, {mats::gamma0()}) < 1e-12);
  }

  ExtensionFamily rfam = extension_family_from_signs(riem_signs());
  CHECK(rfam.kind == FamilyKind::RiemannianPlane);
  for (int i = 0; i < 64; ++i) {
    RealVector p(2);
    p << std::acos(1.0 - 2.0 * ((i * 37) % 64) / 64.0), 2 * M_PI * i / 64.0;
    CliffordSubspace k = rfam.member(p);
    CHECK(k.sig_pos == 2);
    CHECK(k.sig_neg == 0);
  }
}

TEST_CASE("ac_space: Minkowski span{gamma1, gamma2}, Riemannian trivial") {
  opcore::SpinSpace s;
  // fabricate the frame data needed (signs only)
  s.signs = causal_signs();
  s.eigvals.resize(2);
  s.eigvals << -1, 1;
  AcSpace ac = ac_space(s);
  REQUIRE(ac.basis.size() == 2);
  CHECK(subspace_distance(ac.basis, {mats::gamma1(), mats::gamma2()}) < 1e-10);
  CHECK(ac.negative_definite);
  CHECK((ac.gram + RealMatrix::Identity(2, 2)).norm() < 1e-10);  // Gram = -id

  opcore::SpinSpace r;
  r.signs = riem_signs();
  r.eigvals.resize(2);
  r.eigvals << -2, -1;
  AcSpace acr = ac_space(r);
  CHECK(acr.basis.empty());
  CHECK(acr.negative_definite);
}

TEST_CASE("pin generators and adjoint action") {
  // g = id -> O = id
  CliffordSubspace k = check_clifford({mats::gamma0(), mats::gamma2()}, causal_signs());
  AdjointAction oid = adjoint_action(Matrix::Identity(2, 2), k);
  CHECK((oid.matrix - RealMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(oid.residual < 1e-12);

  // v = s_x: O(v) fixes s_x and negates the AC part
  Matrix v = mats::gamma0();
  Matrix g = pin_generator(v, causal_signs());
  CHECK((g - v).norm() < 1e-14);  // timelike: v itself
  AdjointAction o = adjoint_action(g, k);
  RealMatrix expect(2, 2);
  expect << 1, 0, 0, -1;
  CHECK((o.matrix - expect).norm() < 1e-10);

  // spacelike: iv needed
  Matrix w = pin_generator(mats::gamma2(), causal_signs());
  CHECK((w - cplx(0, 1) * mats::gamma2()).norm() < 1e-14);

  CHECK_THROWS(pin_generator(Matrix(2.0 * mats::gamma0()), causal_signs()));

  // i sigma1 on the Riemannian plane: O in O(2) with det -1 on span(sigma1, sigma2)
  CliffordSubspace kr = check_clifford({mats::sigma1(), mats::sigma2()}, riem_signs());
  Matrix gr = pin_generator(mats::sigma1(), riem_signs());
  AdjointAction orr = adjoint_action(gr, kr);
  CHECK(std::abs(orr.matrix.determinant() + 1.0) < 1e-10);
  CHECK((orr.matrix.transpose() * kr.gram * orr.matrix - kr.gram).norm() < 1e-10);
}

TEST_CASE("adjoint action composes and preserves the gram") {
  CliffordSubspace k = check_clifford({mats::gamma0(), mats::gamma2()}, causal_signs());
  Matrix g = pin_generator(mats::gamma0(), causal_signs());
  Matrix h = pin_generator(mats::gamma2(), causal_signs());
  AdjointAction og = adjoint_action(g, k), oh = adjoint_action(h, k), ogh = adjoint_action(g * h, k);
  CHECK((ogh.matrix - og.matrix * oh.matrix).norm() < 1e-9);
  CHECK((og.matrix.transpose() * k.gram * og.matrix - k.gram).norm() < 1e-10);
}

TEST_CASE("stabilizer membership") {
  CliffordSubspace k = check_clifford({mats::sigma1(), mats::sigma2()}, riem_signs());
  StabilizerMembership m1 = stabilizer_membership(Matrix::Identity(2, 2), k);
  CHECK(m1.in_GK);
  CHECK(m1.in_G0);

  Matrix phase = std::exp(cplx(0, 0.7)) * Matrix::Identity(2, 2);
  StabilizerMembership m2 = stabilizer_membership(phase, k);
  CHECK(m2.in_GK);
  CHECK(m2.in_G0);

  // rotation mixing sigma1, sigma2: exp(theta sigma1 sigma2 / 2)
  Matrix j = mats::sigma1() * mats::sigma2();
  double theta = 0.9;
  Matrix rot = std::cos(theta / 2) * Matrix::Identity(2, 2) + std::sin(theta / 2) * j;
  StabilizerMembership m3 = stabilizer_membership(rot, k);
  CHECK(m3.in_GK);
  CHECK(!m3.in_G0);

  // an element moving K off itself: mixes sigma2 with sigma3
  Matrix j23 = mats::sigma2() * mats::sigma3();
  Matrix rot23 = std::cos(0.5) * Matrix::Identity(2, 2) + std::sin(0.5) * j23;
  StabilizerMembership m4 = stabilizer_membership(rot23, k);
  CHECK(!m4.in_GK);
}

TEST_CASE("clifford_compatible_frame maps the maximizers onto the models") {
  opcore::SpinSpace s;
  s.signs = causal_signs();
  // Minkowski maximizer (gamma0, gamma2) -> model (gamma0, gamma1)
  CliffordSubspace k = check_clifford({mats::gamma0(), mats::gamma2()}, causal_signs());
  std::vector<Matrix> model = {mats::gamma0(), mats::gamma1()};
  Matrix c = clifford_compatible_frame(s, k, model);
  // spin-unitary
  Matrix cs = opcore::spin_adjoint(c, s.signs, s.signs);
  CHECK((cs * c - Matrix::Identity(2, 2)).norm() < 1e-9);
  Matrix cinv = c.inverse();
  // the changed frame represents K by the model generators (up to recombination)
  std::vector<Matrix> mapped = {cinv * k.basis[0] * c, cinv * k.basis[1] * c};
  CHECK(subspace_distance(mapped, model) < 1e-8);

  // already compatible: identity works (distance zero even without change)
  CliffordSubspace km = check_clifford(model, causal_signs());
  Matrix c2 = clifford_compatible_frame(s, km, model);
  std::vector<Matrix> mapped2 = {c2.inverse() * km.basis[0] * c2, c2.inverse() * km.basis[1] * c2};
  CHECK(subspace_distance(mapped2, model) < 1e-8);

  // chiral-plane maximizer span(sigma1, sigma2) -> model (sigma1, sigma2)
  opcore::SpinSpace sr;
  sr.signs = riem_signs();
  CliffordSubspace kr = check_clifford(
      {Matrix(0.6 * mats::sigma1() + 0.8 * mats::sigma2()),
       Matrix(-0.8 * mats::sigma1() + 0.6 * mats::sigma2())},
      riem_signs());
  Matrix c3 = clifford_compatible_frame(sr, kr, {mats::sigma1(), mats::sigma2()});
  std::vector<Matrix> mapped3 = {c3.inverse() * kr.basis[0] * c3, c3.inverse() * kr.basis[1] * c3};
  CHECK(subspace_distance(mapped3, {mats::sigma1(), mats::sigma2()}) < 1e-8);

  // signature mismatch rejected
  CHECK_THROWS(clifford_compatible_frame(s, k, {mats::gamma1(), mats::gamma2()}));
}

TEST_CASE("random conjugated subspaces keep the lemma signatures") {
  auto gen = util::rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix u = util::random_unitary(2, gen);
    std::vector<Matrix> riem = {u * mats::sigma1() * u.adjoint(), u * mats::sigma2() * u.adjoint()};
    CliffordSubspace k = check_clifford(riem, riem_signs());
    CHECK(k.sig_pos == 2);
    CHECK(k.sig_neg == 0);
  }
}

TEST_CASE("subspace distance basics") {
  CHECK(subspace_distance({mats::sigma1(), mats::sigma2()}, {mats::sigma2(), mats::sigma1()}) <
        1e-12);
  double d = subspace_distance({mats::sigma1()}, {mats::sigma3()});
  CHECK(d == doctest::Approx(M_PI / 2).epsilon(1e-10));
}
