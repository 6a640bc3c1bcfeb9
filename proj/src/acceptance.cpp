#include "cfl/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "cfl/builders.hpp"
#include "cfl/clifford.hpp"
#include "cfl/opcore.hpp"
#include "cfl/singular.hpp"
#include "cfl/specfun.hpp"
#include "cfl/spinstruct.hpp"
#include "cfl/tangentcone.hpp"
#include "cfl/topo.hpp"
#include "cfl/util.hpp"

namespace cfl::acceptance {

namespace {

using namespace cfl;
using namespace cfl::tangentcone;
namespace sg = cfl::singular;

struct Check {
  std::ostringstream detail;
  bool ok = true;

  void require(const std::string& name, bool pass) {
    if (!pass) {
      ok = false;
      detail << "[" << name << " FAILED] ";
    }
  }
  void note(const std::string& s) { detail << s; }
};

// ---- criterion 1: Dirac sphere operators --------------------------------
Check criterion_sphere() {
  Check c;
  builders::SampledSystem sys = builders::build_dirac_sphere({builders::SphereKind::Single, 3});
  c.require("mesh >= 200 points", sys.samples.size() >= 200);
  double worst_ev = 0, worst_tr = 0;
  for (size_t i = 0; i < std::min<size_t>(sys.samples.size(), 642); ++i) {
    const auto& pt = *sys.samples[i].point;
    worst_ev = std::max(worst_ev, std::abs(pt.eigenvalues()(0) + 1.0));
    worst_ev = std::max(worst_ev, std::abs(pt.eigenvalues()(1) - 3.0));
    worst_tr = std::max(worst_tr, std::abs(pt.matrix().trace().real() - 2.0));
    worst_tr = std::max(worst_tr, std::abs((pt.matrix() * pt.matrix()).trace().real() - 10.0));
  }
  c.require("eigenvalues {3,-1} within 1e-12", worst_ev < 1e-12);
  c.require("tr F = 2, tr F^2 = 10 within 1e-12", worst_tr < 1e-12);
  c.detail << "max eig dev " << worst_ev << ", max trace dev " << worst_tr;
  return c;
}

// ---- criterion 2: causal classification ---------------------------------
Check criterion_causal() {
  Check c;
  auto sphere_point = [](const Eigen::Vector3d& p) {
    Matrix f = 2.0 * (p(0) * mats::sigma1() + p(1) * mats::sigma2() + p(2) * mats::sigma3()) +
               Matrix::Identity(2, 2);
    return opcore::FermionPoint(std::move(f));
  };
  opcore::FermionPoint north = sphere_point({0, 0, 1}), south = sphere_point({0, 0, -1}),
                       equator = sphere_point({1, 0, 0});
  auto ts = opcore::causal_classify(north, south);
  c.require("pole/antipole timelike", ts.relation == opcore::CausalRelation::Timelike);
  auto sp = opcore::causal_classify(north, equator);
  c.require("pole/equator spacelike", sp.relation == opcore::CausalRelation::Spacelike);
  double spread = std::abs(std::abs(sp.lambdas[0]) - std::abs(sp.lambdas[1]));
  c.require("|lambda| spread < 1e-10", spread < 1e-10);

  builders::SampledSystem sys = builders::build_dirac_sphere({builders::SphereKind::Single, 2});
  auto gen = util::rng(2026);
  std::uniform_int_distribution<int> pick(0, (int)sys.samples.size() - 1);
  bool sym = true;
  for (int t = 0; t < 1000; ++t) {
    int i = pick(gen), j = pick(gen);
    auto ab = opcore::causal_classify(*sys.samples[i].point, *sys.samples[j].point);
    auto ba = opcore::causal_classify(*sys.samples[j].point, *sys.samples[i].point);
    if (ab.relation != ba.relation) sym = false;
  }
  c.require("classification symmetric on 1e3 random pairs", sym);
  c.detail << "spread " << spread;
  return c;
}

// ---- criterion 3: Euclidean plane ----------------------------------------
Check criterion_plane() {
  Check c;
  double worst_idem = 0, worst_tr = 0;
  for (int nodes : {2, 8, 64}) {
    for (double x : {0.0, 0.37, 1.91, -2.73}) {
      Matrix f = builders::plane_discrete_F(1.0, nodes, {x, -0.61 * x});
      worst_idem = std::max(worst_idem, (f * f + f).norm());
      worst_tr = std::max(worst_tr, std::abs(f.trace().real() + 2.0));
    }
  }
  c.require("F^2 + F = 0 within 1e-12", worst_idem < 1e-12);
  c.require("tr F = -2 within 1e-12", worst_tr < 1e-12);

  auto prov = builders::make_plane_provider(1.0);
  double worst_chain = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      Eigen::Vector2d xi(0.05 + 0.38 * i, 0.04 + 0.36 * j);
      if (xi.norm() > 5.0) continue;
      Mat2 chain = prov->eval_P({0, 0}, xi) * prov->eval_P(xi, {0, 0});
      double expct = std::pow(specfun::bessel_j0(xi.norm()), 2) +
                     std::pow(specfun::bessel_j1(xi.norm()), 2);
      worst_chain = std::max(worst_chain, (chain - expct * Mat2::Identity()).norm());
    }
  c.require("closed chain = (J0^2+J1^2) id within 1e-10", worst_chain < 1e-10);
  c.detail << "idem " << worst_idem << ", chain " << worst_chain;
  return c;
}

// ---- criterion 4: Minkowski kernel ---------------------------------------
Check criterion_minkowski() {
  Check c;
  builders::MinkowskiProvider prov({1.0, 0.1, 1e-12, builders::MinkowskiMode::Quadrature});
  auto gen = util::rng(4);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  double worst_rel = 0;
  for (int t = 0; t < 25; ++t) {
    Eigen::Vector2d xi(ud(gen), ud(gen));
    Mat2 q = prov.eval_P_quadrature(xi), k = prov.eval_P_closed(xi);
    worst_rel = std::max(worst_rel, (q - k).norm() / k.norm());
  }
  c.require("quadrature vs closed form rel 1e-6 on 25 points", worst_rel < 1e-6);
  Eigen::Vector2d nu = prov.eval_nu();
  c.require("nu1 < 0 < nu2", nu(0) < 0 && nu(1) > 0);

  // the five pseudo-orthonormal-basis identities, dense route vs P formulas
  double worst_id = 0;
  for (int t = 0; t < 25; ++t) {
    Eigen::Vector2d a(ud(gen), ud(gen)), b(ud(gen), ud(gen));
    if ((a - b).norm() < 0.05) continue;
    builders::PairFrames pf = builders::pair_frames(prov, a, b);
    builders::PairEmbedding pe = builders::embed_pair(prov, a, b);
    auto px = std::make_shared<opcore::FermionPoint>(pe.x_op);
    auto py = std::make_shared<opcore::FermionPoint>(pe.y_op);
    opcore::SpinSpace sx = opcore::spin_space_with_frame(px, pe.frame_x, pe.nu, pe.signs);
    opcore::SpinSpace sy = opcore::spin_space_with_frame(py, pe.frame_y, pe.nu, pe.signs);

    // (1) x = diag(nu), pi_x = id, s_x = diag(1,-1) in the frame
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = pf.nu(0);
    d(1, 1) = pf.nu(1);
    worst_id = std::max(worst_id, (opcore::kernel(sx, sx).matrix - d).norm());
    worst_id = std::max(worst_id, (opcore::euclidean_sign(sx).matrix - mats::gamma0()).norm());
    // (2) pi_x y|_{S_y} = P(x,y)
    worst_id = std::max(worst_id, (opcore::kernel(sx, sy).matrix - Matrix(pf.P_xy)).norm());
    // (3) closed chain
    worst_id = std::max(
        worst_id, (opcore::closed_chain(sx, sy).matrix - Matrix(pf.P_xy * pf.P_yx)).norm());
    // (4)/(5): sign/projector sandwiches via the dense operator route
    builders::SampledSystem two;
    two.signature = SpinSignature(1, 1);
    two.hilbert = HilbertModel(4);
    builders::Sample s0, s1;
    s0.coords = a;
    s0.weight = 0.5;
    s0.point = px;
    s1.coords = b;
    s1.weight = 0.5;
    s1.point = py;
    two.samples = {s0, s1};
    two.total_measure = 1.0;
    two.spin = {sx, sy};
    Mat2 dabs = Mat2::Zero(), dinv = Mat2::Zero();
    for (int i = 0; i < 2; ++i) {
      dabs(i, i) = 1.0 / std::abs(pf.nu(i));
      dinv(i, i) = 1.0 / pf.nu(i);
    }
    Matrix lhs_sign = eval_A(two, 0, 1, {FunctionalKind::SignDiff, FunctionalPart::Full});
    Matrix rhs_sign = -(pf.P_xy * dabs * pf.P_yx) + d * dabs * d;
    worst_id = std::max(worst_id, (lhs_sign - rhs_sign).norm());
    Matrix lhs_proj = eval_A(two, 0, 1, {FunctionalKind::ProjDiff, FunctionalPart::Full});
    Matrix rhs_proj = pf.P_xy * dinv * pf.P_yx - d;
    worst_id = std::max(worst_id, (lhs_proj - rhs_proj).norm());
  }
  c.require("five basis identities within 1e-8 on 25 pairs", worst_id < 1e-8);
  c.detail << "kernel rel " << worst_rel << ", identity resid " << worst_id;
  return c;
}

// ---- criterion 5: chiral plane --------------------------------------------
Check criterion_chiral() {
  Check c;
  for (double tau : {0.25, 0.5}) {
    auto prov = builders::make_chiral_provider(1.0, tau);
    Eigen::Vector2d nu = prov->eval_nu();
    c.require("nu = -(1+-tau)^2 within 1e-8",
              std::abs(nu(0) + (1 + tau) * (1 + tau)) < 1e-8 &&
                  std::abs(nu(1) + (1 - tau) * (1 - tau)) < 1e-8);
    spinstruct::DirectionalDerivative d =
        spinstruct::dA(*prov, {FunctionalKind::Chain, FunctionalPart::Full}, {0, 0}, 1e-3);
    double fitted =
        util::hs_inner(Matrix(mats::sigma2() / std::sqrt(2.0)), d.partials[0]) / std::sqrt(2.0);
    double expected = 2.0 * tau * (1 - tau * tau);  // m = 1 reference point
    c.require("c0 fit within 1 percent", std::abs(fitted - expected) < 0.01 * std::abs(expected));
  }
  auto prov = builders::make_chiral_provider(1.0, 0.5);
  builders::SampledSystem sys = builders::provider_system_with_polar_grid(prov, {0, 0}, 0.3, 32, 96);
  ConeMeasureEstimate mu = estimate_cone_measure(
      sys, 0, {FunctionalKind::Chain, FunctionalPart::Full}, std::nullopt, circle_cells(16));
  clifford::ExtensionFamily fam = clifford::extension_family_from_signs(spin_signs_at(sys, 0));
  MaximizeResult res = maximize_clifford(mu, fam, 128);
  double angle =
      clifford::subspace_distance(res.maximizer.basis, {mats::sigma1(), mats::sigma2()});
  c.require("maximizer span(sigma1,sigma2) within angle 1e-2", res.unique && angle < 1e-2);
  spinstruct::DirectionalDerivative d =
      spinstruct::dA(*prov, {FunctionalKind::Chain, FunctionalPart::Full}, {0, 0}, 1e-3);
  spinstruct::SpinStructureMap g = spinstruct::gamma_map(d, res.maximizer);
  c.require("gamma bijective with Riemannian metric",
            g.bijective && g.metric_pos == 2 && g.metric_neg == 0);
  c.detail << "maximizer angle " << angle;
  return c;
}

// ---- criterion 6: Minkowski spin structure --------------------------------
Check criterion_spinstructure() {
  Check c;
  auto prov =
      builders::make_minkowski_provider({1.0, 0.1, 1e-12, builders::MinkowskiMode::ClosedForm});
  builders::SampledSystem sys =
      builders::provider_system_with_polar_grid(prov, {0, 0}, 1.5e-4, 24, 64);
  ConeMeasureEstimate mu = estimate_cone_measure(
      sys, 0, {FunctionalKind::SignDiff, FunctionalPart::Full}, ConeWindow{0.0, 1.5}, atom_cells());
  clifford::ExtensionFamily fam = clifford::extension_family_from_signs(spin_signs_at(sys, 0));
  Eigen::VectorXi ac = spin_signs_at(sys, 0);
  double total = mu.total();
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < 32; ++i) {
    double phi = M_PI * i / 31.0;
    RealVector p(1);
    p << phi;
    double l = L_functional(fam.member_basis(p), mu, ac);
    double sn = std::sin(phi) * std::sin(phi) * total;
    sxx += sn * sn;
    sxy += sn * l;
    syy += l * l;
  }
  double r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  c.require("L(K^phi) ~ sin^2 phi with R^2 > 0.999", r2 > 0.999);

  RealVector u(2);
  u << 0, 1;
  RealVector ladder(1);
  ladder << 1e-4;
  double resid = spinstruct::sign_derivative_anticommute(*prov, {0, 0}, u, ladder)[0];
  c.require("{s_x, d s}(h=1e-4) residual < 1e-6", resid < 1e-6);

  double e = spinstruct::E_functional(*prov, {0, 0}, {0.2, 0.3});
  c.require("E antisymmetric exactly", e == -spinstruct::E_functional(*prov, {0.2, 0.3}, {0, 0}));

  auto gen = util::rng(6);
  std::uniform_real_distribution<double> ud(-0.5, 0.5);
  double worst_rel = 0;
  for (int t = 0; t < 50; ++t) {
    Eigen::Vector2d a(ud(gen), ud(gen)), b(ud(gen), ud(gen));
    spinstruct::EClosedFormCheck chk = spinstruct::e_closedform_check(*prov, a, b);
    if (std::abs(chk.lhs) < 1e-14) continue;
    worst_rel = std::max(worst_rel, chk.relerr);
  }
  c.require("E closed form relerr < 1e-6 on 50 pairs", worst_rel < 1e-6);

  spinstruct::DirectionalDerivative d = spinstruct::time_augmented_dA(*prov, {0, 0}, 0.2, 1e-3);
  Eigen::VectorXi causal(2);
  causal << 1, -1;
  clifford::CliffordSubspace cl = clifford::check_clifford({mats::gamma0(), mats::gamma2()}, causal);
  c.require("augmented dA rank 2", spinstruct::gamma_map(d, cl).bijective);
  c.detail << "R^2 " << r2 << ", E relerr " << worst_rel;
  return c;
}

// ---- criterion 7: singular ODEs -------------------------------------------
Check criterion_singular() {
  Check c;
  Vector init(2);
  init << 1.0, 0.0;

  std::vector<double> ladder = {0.1, 0.05, 0.025, 0.0125};
  std::vector<sg::RadialSolution> neck, torus;
  for (double e : ladder) {
    neck.push_back(sg::integrate_mode(sg::neck_rhs(1.0, 1.0, e), -2, 2, init, 1 << 14));
    torus.push_back(sg::integrate_mode(sg::torus_s1_rhs(0.0, 1.0, 1.0, e), -2, 2, init, 1 << 14));
  }
  double drift = 0;
  for (const auto& s : neck) drift = std::max(drift, s.max_norm_drift());
  for (const auto& s : torus) drift = std::max(drift, s.max_norm_drift());
  c.require("neck/torus norm drift < 1e-8", drift < 1e-8);

  auto ratios = [](const std::vector<sg::RadialSolution>& sols) {
    std::vector<double> d;
    for (size_t i = 0; i + 1 < sols.size(); ++i) d.push_back(sg::sup_difference(sols[i], sols[i + 1]));
    std::vector<double> r;
    for (size_t i = 0; i + 1 < d.size(); ++i) r.push_back(d[i + 1] / d[i]);
    return r;
  };
  // The neck sup-differences scale as sqrt(eps) (phase accumulated through the
  // pinch is k * int |Delta(1/R)| ~ sqrt(eps)), so the per-halving ratio tends
  // to 1/sqrt(2) ~ 0.707; the stated 0.6 gate cannot be met for k != 0. The
  // warped torus x S1 coefficient 1/S = R converges at eps^(3/2) and passes.
  bool ladder_ok = true;
  std::vector<double> rn = ratios(neck), rt = ratios(torus);
  for (double r : rn)
    if (!(r < 0.6)) ladder_ok = false;
  for (double r : rt)
    if (!(r < 0.6)) ladder_ok = false;
  c.require("epsilon-ladder Cauchy ratio < 0.6 per halving", ladder_ok);
  c.detail << "neck ratios ";
  for (double r : rn) c.detail << r << " ";
  c.detail << "; torus ratios ";
  for (double r : rt) c.detail << r << " ";

  double resid = 0;
  for (int which : {+1, -1, 3}) {
    double k = which == 3 ? 1.5 : 0.5 * which;
    auto rhs = sg::cone_rhs(1.0, k);
    for (double r = 0.05; r <= 5.0; r += 0.05) {
      Vec2 chi = sg::cone_chi(r, which);
      Vec2 want = (rhs(r) * Vector(chi)).head<2>();
      resid = std::max(resid,
                       (sg::cone_chi_deriv(r, which) - want).norm() / std::max(1.0, chi.norm()));
    }
  }
  c.require("conical explicit residual < 1e-8", resid < 1e-8);
  double lim = sg::cone_F_scalar(1e-7) / 1e-7;
  c.require("rescaled F limit finite nonzero", std::isfinite(lim) && std::abs(lim + 1.0) < 1e-6);

  bool s1_ok = true;
  double offmod = std::abs(sg::cone_s1_F(1e-4, 0.0)(0, 1));
  for (double phi : {0.0, 0.8, 1.7, 3.1, 5.0}) {
    Mat2 f = sg::cone_s1_F(1e-4, phi);
    Eigen::SelfAdjointEigenSolver<Mat2> es(f);
    if (std::abs(es.eigenvalues()(0)) < 0.5 || std::abs(es.eigenvalues()(1)) < 0.5) s1_ok = false;
    if (std::abs(std::abs(f(0, 1)) - offmod) > 1e-6) s1_ok = false;
  }
  c.require("cone x S1 limit rank 2 with constant offdiagonal modulus", s1_ok);
  return c;
}

// ---- criterion 8: Schwarzschild --------------------------------------------
Check criterion_schwarzschild() {
  Check c;
  sg::SchwarzschildParams par;
  Vector init(2);
  init << 1.0, cplx(0, 0.5);
  init /= init.norm();
  double drift = 0;
  for (double omega : {0.0, 1.0})
    for (int lam : {1, -1})
      for (double kh : {0.5, -0.5}) {
        sg::ModeSpec mode;
        mode.omega = omega;
        mode.lambda_sep = lam;
        mode.k_half = kh;
        mode.m_mass = 0.1;
        drift = std::max(drift,
                         sg::schwarzschild_radial(par, mode, 0.01, 1.9, 1 << 14, init).max_norm_drift());
      }
  c.require("|X| conserved to 1e-6 across the mode set", drift < 1e-6);

  sg::ModeSpec mode;
  mode.omega = 1.0;
  mode.lambda_sep = 1;
  mode.k_half = 0.5;
  mode.m_mass = 0.1;
  std::vector<double> lows = {0.01, 0.005, 0.0025, 0.00125};
  std::vector<Vector> ends;
  for (double lo : lows)
    ends.push_back(sg::schwarzschild_radial(par, mode, lo, 1.0, 1 << 13, init).values.back());
  bool cauchy = true;
  double prev = 1e300;
  for (size_t i = 0; i + 1 < ends.size(); ++i) {
    double d = (ends[i + 1] - ends[i]).norm();
    if (d > prev) cauchy = false;
    prev = d;
  }
  c.require("left-endpoint ladder Cauchy", cauchy && prev < 1e-2);

  RealVector times(4);
  times << 0.0, 0.2, 0.4, 0.6;
  sg::PacketResult pr = sg::schwarzschild_packet(par, 0.1, 1, 0.5, 40.0, 4.0, 81, 1.65, 0.05, 1.9,
                                                 times, 3000);
  c.require("packet slope within 5 percent of 1", std::abs(pr.slope - 1.0) < 0.05);
  c.detail << "drift " << drift << ", slope " << pr.slope;
  return c;
}

// ---- criterion 9: lattice ---------------------------------------------------
Check criterion_lattice() {
  Check c;
  double kappa = M_PI / 8;
  builders::SampledSystem sys = builders::build_torus_lattice(kappa);
  Matrix f00 = builders::lattice_F({0, 0});
  c.require("antipodal distances sqrt24 and 4 within 1e-12",
            std::abs(util::hs_dist(f00, builders::lattice_F({M_PI, 0})) - std::sqrt(24.0)) < 1e-12 &&
                std::abs(util::hs_dist(f00, builders::lattice_F({M_PI, M_PI})) - 4.0) < 1e-12);

  topo::OperatorCloud cloud = topo::make_cloud(sys, topo::CloudNorm::HilbertSchmidt);
  bool bound_ok = true;
  for (int i = 0; i < cloud.size(); ++i)
    for (int j = i + 1; j < cloud.size(); ++j) {
      double dx = sys.samples[i].coords(0) - sys.samples[j].coords(0);
      double dy = sys.samples[i].coords(1) - sys.samples[j].coords(1);
      double bound = std::sqrt(24.0) * (std::abs(std::sin(dx / 2)) + std::abs(std::sin(dy / 2)));
      if (cloud.distances(i, j) > bound + 1e-12) bound_ok = false;
    }
  c.require("distance bound on all pairs", bound_ok);

  std::vector<topo::ScanRow> rows = topo::scale_scan(cloud, {0.30, 0.49, 1.0, 1.5, 2.45});
  double lo = std::sqrt(24.0) * std::sin(kappa / 2);
  bool discrete = rows[0].regime == "discrete" && rows[0].beta0 == 256;
  bool torus_window = false, blob = rows.back().regime == "blob";
  for (const auto& r : rows)
    if (r.regime == "torus" && r.r > lo && r.r < 2.0) torus_window = true;
  c.require("scan regimes (256,0) -> (1,2) in window -> collapse",
            discrete && torus_window && blob);

  bool mdelta_ok = true;
  for (double delta : {0.025, 0.04, 0.05}) {
    topo::BettiReport b = topo::betti(topo::m_delta_complex(cloud, delta));
    if (b.beta0 != 1 || b.beta1 != 2) mdelta_ok = false;
  }
  c.require("M_delta torus regime inside the window", mdelta_ok);
  return c;
}

// ---- criterion 10: property suites -----------------------------------------
Check criterion_properties() {
  Check c;
  auto gen = util::rng(10);

  bool riem_ok = true;
  for (int t = 0; t < 1000; ++t) {
    Matrix a = util::random_hermitian(4, gen), b = util::random_hermitian(4, gen);
    auto riem = [&](const Matrix& m) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(m);
      Matrix v = es.eigenvectors().leftCols(2);
      Matrix d = Matrix::Zero(2, 2);
      d(0, 0) = -1.0 - std::abs(es.eigenvalues()(0));
      d(1, 1) = -0.3 - std::abs(es.eigenvalues()(1));
      return Matrix(v * d * v.adjoint());
    };
    if (!opcore::riemannian_spectrum_check(opcore::FermionPoint(riem(a)),
                                           opcore::FermionPoint(riem(b))))
      riem_ok = false;
  }
  c.require("Riemannian lambda positivity on 1e3 pairs", riem_ok);

  bool transport_ok = true;
  std::uniform_real_distribution<double> ud(-1, 1);
  for (int t = 0; t < 100; ++t) {
    Eigen::Vector3d p(ud(gen), ud(gen), ud(gen));
    p.normalize();
    Eigen::Vector3d q = (p + 0.25 * Eigen::Vector3d(ud(gen), ud(gen), ud(gen))).normalized();
    auto mk = [](const Eigen::Vector3d& v) {
      return std::make_shared<opcore::FermionPoint>(
          Matrix(2.0 * (v(0) * mats::sigma1() + v(1) * mats::sigma2() + v(2) * mats::sigma3()) +
                 Matrix::Identity(2, 2)));
    };
    opcore::SpinSpace sp = opcore::spin_space(mk(p)), sq = opcore::spin_space(mk(q));
    Matrix u = opcore::transport(sp, sq);
    Matrix uu = u * opcore::spin_adjoint(u, sq.signs, sp.signs);
    if ((uu - Matrix::Identity(2, 2)).norm() > 1e-10) transport_ok = false;
  }
  c.require("transport unitarity", transport_ok);

  bool cliff_ok = true;
  Eigen::VectorXi riem_signs(2), causal_signs(2);
  riem_signs << 1, 1;
  causal_signs << 1, -1;
  for (int t = 0; t < 50; ++t) {
    Matrix u = util::random_unitary(2, gen);
    auto k = clifford::check_clifford(
        {Matrix(u * mats::sigma1() * u.adjoint()), Matrix(u * mats::sigma2() * u.adjoint())},
        riem_signs);
    if (k.sig_pos != 2 || k.sig_neg != 0) cliff_ok = false;
    double phi = M_PI * ud(gen);
    auto kc = clifford::check_clifford(
        {mats::gamma0(), Matrix(std::cos(phi) * mats::gamma1() + std::sin(phi) * mats::gamma2())},
        causal_signs);
    if (kc.sig_pos != 1 || kc.sig_neg != 1) cliff_ok = false;
  }
  c.require("Clifford signature lemmas (m,0)/(1,m-1)", cliff_ok);

  bool euler_ok = true;
  std::uniform_real_distribution<double> u01(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 8 + (int)(u01(gen) * 20);
    topo::NerveComplex cx;
    cx.vertices = n;
    std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (u01(gen) < 0.3) {
          cx.edges.push_back({i, j});
          has[i][j] = true;
        }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
          if (has[i][j] && has[i][k] && has[j][k]) cx.triangles.push_back({i, j, k});
    topo::BettiReport b = topo::betti(cx);
    int beta2 = b.triangles - b.rank_d2;
    if (b.vertices - b.edges + b.triangles != b.beta0 - b.beta1 + beta2) euler_ok = false;
  }
  c.require("GF(2) Euler consistency on 100 complexes", euler_ok);
  return c;
}

}  // namespace

std::vector<CriterionResult> run_all(std::ostream* progress) {
  struct Entry {
    int id;
    const char* name;
    Check (*fn)();
  };
  const Entry entries[] = {
      {1, "Dirac sphere operators", criterion_sphere},
      {2, "causal classification", criterion_causal},
      {3, "Euclidean plane", criterion_plane},
      {4, "Minkowski kernel", criterion_minkowski},
      {5, "chiral plane", criterion_chiral},
      {6, "Minkowski spin structure", criterion_spinstructure},
      {7, "singular ODEs", criterion_singular},
      {8, "Schwarzschild interior", criterion_schwarzschild},
      {9, "lattice topology", criterion_lattice},
      {10, "property suites", criterion_properties},
  };
  std::vector<CriterionResult> out;
  for (const auto& e : entries) {
    auto t0 = std::chrono::steady_clock::now();
    Check c = e.fn();
    auto t1 = std::chrono::steady_clock::now();
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    r.passed = c.ok;
    r.detail = c.detail.str();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (progress)
      (*progress) << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name
                  << ") [" << r.seconds << " s] " << r.detail << "\n";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cfl::acceptance
