#include "cfl/spinstruct.hpp"

#include <cmath>

#include "cfl/util.hpp"

namespace cfl::spinstruct {

using tangentcone::provider_functional_matrix;

Matrix DirectionalDerivative::apply(const RealVector& u) const {
  Matrix out = Matrix::Zero(partials.front().rows(), partials.front().cols());
  for (int i = 0; i < (int)partials.size(); ++i) out += u(i) * partials[i];
  return out;
}

namespace {

Matrix central_diff(const std::function<Matrix(const Eigen::Vector2d&)>& fn,
                    const Eigen::Vector2d& x, const Eigen::Vector2d& dir, double h) {
  return (fn(x + h * dir) - fn(x - h * dir)) / (2.0 * h);
}

// central difference with one Richardson halving: (4 D_{h/2} - D_h)/3
Matrix richardson(const std::function<Matrix(const Eigen::Vector2d&)>& fn, const Eigen::Vector2d& x,
                  const Eigen::Vector2d& dir, double h, double* err) {
  Matrix dh = central_diff(fn, x, dir, h);
  Matrix dh2 = central_diff(fn, x, dir, 0.5 * h);
  if (err) *err = (dh2 - dh).norm();
  return (4.0 * dh2 - dh) / 3.0;
}

}  // namespace

DirectionalDerivative dA(const builders::KernelProvider& prov, const ConeFunctional& f,
                         const Eigen::Vector2d& x, double h) {
  auto fn = [&](const Eigen::Vector2d& y) { return provider_functional_matrix(prov, f, x, y); };
  DirectionalDerivative out;
  out.step = h;
  double e0 = 0, e1 = 0;
  out.partials.push_back(richardson(fn, x, {1, 0}, h, &e0));
  out.partials.push_back(richardson(fn, x, {0, 1}, h, &e1));
  out.error_estimate = std::max(e0, e1);
  return out;
}

RealMatrix induced_metric(const std::vector<Matrix>& gamma_ops) {
  const int k = (int)gamma_ops.size();
  RealMatrix g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      Matrix ac = gamma_ops[i] * gamma_ops[j] + gamma_ops[j] * gamma_ops[i];
      g(i, j) = ac.trace().real() / (2.0 * (double)gamma_ops[i].rows());
    }
  return 0.5 * (g + RealMatrix(g.transpose()));
}

SpinStructureMap gamma_map(const DirectionalDerivative& d, const clifford::CliffordSubspace& cl,
                           double rank_tol) {
  SpinStructureMap out;
  // HS-orthonormal basis of Cl
  std::vector<Matrix> q;
  for (Matrix m : cl.basis) {
    for (const auto& u : q) m -= util::hs_inner(u, m) * u;
    double nn = m.norm();
    if (nn > 1e-12) q.push_back(m / nn);
  }
  const int k = d.tangent_dim();
  out.coefficients.resize((int)q.size(), k);
  for (int i = 0; i < k; ++i) {
    Matrix proj = Matrix::Zero(d.partials[i].rows(), d.partials[i].cols());
    for (size_t a = 0; a < q.size(); ++a) {
      double c = util::hs_inner(q[a], d.partials[i]);
      out.coefficients((int)a, i) = c;
      proj += c * q[a];
    }
    out.gamma.push_back(proj);
  }
  Eigen::JacobiSVD<RealMatrix> svd(out.coefficients);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > rank_tol * std::max(smax, 1e-300)) ++rank;
  out.bijective = (rank == k) && ((int)q.size() == k);
  out.induced_metric = induced_metric(out.gamma);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(out.induced_metric);
  double gs = std::max(1.0, out.induced_metric.norm());
  for (int i = 0; i < k; ++i) {
    double ev = es.eigenvalues()(i);
    if (ev > 1e-9 * gs) out.metric_pos++;
    else if (ev < -1e-9 * gs) out.metric_neg++;
  }
  return out;
}

std::vector<double> sign_derivative_anticommute(const builders::KernelProvider& prov,
                                                const Eigen::Vector2d& x, const RealVector& u,
                                                const RealVector& h_ladder) {
  ConeFunctional f;
  f.kind = tangentcone::FunctionalKind::SignDiff;
  Eigen::Vector2d dir(u(0), u(1));
  double un = dir.norm();
  std::vector<double> out;
  Mat2 g = prov.riemannian() ? Mat2(Mat2::Identity()) : mats::gamma0();
  auto fn = [&](const Eigen::Vector2d& y) { return provider_functional_matrix(prov, f, x, y); };
  for (int i = 0; i < h_ladder.size(); ++i) {
    if (un < 1e-300) {
      out.push_back(0.0);
      continue;
    }
    Matrix da = central_diff(fn, x, dir / un, h_ladder(i)) * un;
    out.push_back((g * da + da * g).norm());
  }
  return out;
}

cplx B_functional(const builders::KernelProvider& prov, const Eigen::Vector2d& z,
                  const Eigen::Vector2d& zp) {
  Mat2 p = prov.eval_P(z, zp);
  Mat2 pp = prov.eval_P(zp, z);
  Mat2 g0 = mats::gamma0();
  Mat2 c = p * g0 - g0 * p;
  return (c * pp * c * pp).trace();
}

double E_functional(const builders::KernelProvider& prov, const Eigen::Vector2d& z,
                    const Eigen::Vector2d& zp) {
  cplx e = (B_functional(prov, z, zp) - B_functional(prov, zp, z)) / cplx(0, 2);
  return e.real();
}

EClosedFormCheck e_closedform_check(const builders::KernelProvider& prov, const Eigen::Vector2d& z,
                                    const Eigen::Vector2d& zp) {
  EClosedFormCheck out;
  out.lhs = E_functional(prov, z, zp);

  builders::PairFrames pf = builders::pair_frames(prov, z, zp);
  Mat2 d = Mat2::Zero(), dinv = Mat2::Zero();
  for (int i = 0; i < 2; ++i) {
    d(i, i) = pf.nu(i);
    dinv(i, i) = 1.0 / pf.nu(i);
  }
  Mat2 pi_x_y = pf.P_xy * dinv;           // pi_x applied to S_y
  Mat2 pi_y_x = pf.P_yx * dinv;           // pi_y applied to S_x
  Mat2 x_from_y = d * pf.P_xy * dinv;     // operator x on S_y
  Mat2 y_from_x = d * pf.P_yx * dinv;     // operator y on S_x
  Mat2 w1 = x_from_y * pi_y_x * pi_x_y * y_from_x;  // Tr(x pi_y pi_x y)
  Mat2 w2 = x_from_y * y_from_x * pi_x_y * pi_y_x;  // Tr(x y pi_x pi_y)
  double c = 4.0 * pf.nu(0) * pf.nu(0) * pf.nu(1) * pf.nu(1) /
             ((pf.nu(1) - pf.nu(0)) * (pf.nu(1) - pf.nu(0)));
  out.rhs = (cplx(0, 1) * c * (w1.trace() - w2.trace())).real();
  double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.relerr = scale > 0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  return out;
}

DirectionalDerivative time_augmented_dA(const builders::KernelProvider& prov,
                                        const Eigen::Vector2d& x, double delta, double h,
                                        const builders::SampledSystem* samples) {
  ConeFunctional base;
  base.kind = tangentcone::FunctionalKind::SignDiff;
  Mat2 sx = prov.riemannian() ? Mat2(Mat2::Identity()) : mats::gamma0();

  std::function<double(const Eigen::Vector2d&)> ball_integral;
  if (samples) {
    if (samples->samples.empty())
      throw std::invalid_argument("time_augmented_dA: empty sample system");
    ball_integral = [&prov, samples, delta, x](const Eigen::Vector2d& y) {
      double acc = 0.0;
      bool hit = false;
      for (const auto& s : samples->samples) {
        Eigen::Vector2d th = s.coords.head<2>();
        if ((th - y).norm() >= delta) continue;
        hit = true;
        acc += s.weight * E_functional(prov, x, th);
      }
      if (!hit) throw std::runtime_error("time_augmented_dA: ball empty at the sample resolution");
      return acc;
    };
  } else {
    ball_integral = [&prov, delta, x](const Eigen::Vector2d& y) {
      // 16-point product Gauss rule on the coordinate ball (4 radial x 4 angular)
      static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                   0.8611363115940526};
      static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                   0.3478548451374538};
      double acc = 0.0;
      for (int i = 0; i < 4; ++i) {
        double r = 0.5 * delta * (gx[i] + 1.0);
        double wr = 0.5 * delta * gw[i];
        for (int j = 0; j < 4; ++j) {
          double th = M_PI * (gx[j] + 1.0);
          double wt = M_PI * gw[j];
          Eigen::Vector2d p = y + r * Eigen::Vector2d(std::cos(th), std::sin(th));
          acc += wr * wt * r * E_functional(prov, x, p);
        }
      }
      return acc;
    };
  }

  auto fn = [&](const Eigen::Vector2d& y) {
    Matrix a = provider_functional_matrix(prov, base, x, y);
    return Matrix(a + ball_integral(y) * sx);
  };
  DirectionalDerivative out;
  out.step = h;
  double e0 = 0, e1 = 0;
  out.partials.push_back(richardson(fn, x, {1, 0}, h, &e0));
  out.partials.push_back(richardson(fn, x, {0, 1}, h, &e1));
  out.error_estimate = std::max(e0, e1);
  return out;
}

}  // namespace cfl::spinstruct
