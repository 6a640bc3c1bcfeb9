#include "cfl/singular.hpp"

#include <cmath>

#include "cfl/util.hpp"

namespace cfl::singular {

DiracCoefficients dirac_coefficients(const DiagonalMetric& metric,
                                     const std::vector<FrameFn>& g_funcs, const RealVector& point,
                                     double h) {
  if ((int)g_funcs.size() != metric.dim || point.size() != metric.dim)
    throw std::invalid_argument("dirac_coefficients: dimension mismatch");
  DiracCoefficients out;
  auto sqrt_det = [&](const RealVector& p) {
    double det = 1.0;
    for (int i = 0; i < metric.dim; ++i) {
      double gi = metric.coeffs[i](p);
      if (gi <= 0.0) throw std::domain_error("dirac_coefficients: metric coefficient <= 0");
      det *= gi;
    }
    return std::sqrt(det);
  };

  for (int j = 0; j < metric.dim; ++j) out.G.push_back(g_funcs[j](point));
  const int d = (int)out.G.front().rows();

  // anticommutation residual {G^i, G^j} = 2 g^{ij}
  double resid = 0.0;
  for (int i = 0; i < metric.dim; ++i)
    for (int j = 0; j < metric.dim; ++j) {
      Matrix ac = out.G[i] * out.G[j] + out.G[j] * out.G[i];
      double gij = (i == j) ? 2.0 * metric.sign_pattern(i) / metric.coeffs[i](point) : 0.0;
      resid = std::max(resid, (ac - gij * Matrix::Identity(d, d)).norm());
    }
  out.anticommutation_residual = resid;

  Matrix b = Matrix::Zero(d, d);
  for (int j = 0; j < metric.dim; ++j) {
    RealVector pp = point, pm = point;
    pp(j) += h;
    pm(j) -= h;
    b += (sqrt_det(pp) * g_funcs[j](pp) - sqrt_det(pm) * g_funcs[j](pm)) / (2.0 * h);
  }
  out.B = cplx(0, 0.5) / sqrt_det(point) * b;
  return out;
}

void validate_schwarzschild_mode(const ModeSpec& mode) {
  if (mode.lambda_sep == 0) throw std::invalid_argument("mode: lambda must be a nonzero integer");
  double bound = std::abs((double)mode.lambda_sep) - 0.5;
  if (std::abs(mode.k_half) > bound + 1e-12)
    throw std::invalid_argument("mode: k must lie in [-|lambda|+1/2, |lambda|-1/2]");
  double twice = 2.0 * mode.k_half;
  if (std::abs(twice - std::llround(twice)) > 1e-12 || std::llround(twice) % 2 == 0)
    throw std::invalid_argument("mode: k must be a half-integer");
}

double RadialSolution::max_norm_drift() const {
  if (norm_log.size() == 0) return 0.0;
  double n0 = norm_log(0), worst = 0.0;
  for (int i = 0; i < norm_log.size(); ++i) worst = std::max(worst, std::abs(norm_log(i) - n0));
  return worst;
}

double sup_difference(const RadialSolution& a, const RadialSolution& b) {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("sup_difference: grid mismatch");
  double worst = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i)
    worst = std::max(worst, (a.values[i] - b.values[i]).norm());
  return worst;
}

RadialSolution integrate_mode(const RhsFn& rhs, double t0, double t1, const Vector& init,
                              int steps) {
  if (steps < 1) throw std::invalid_argument("integrate_mode: steps >= 1");
  RadialSolution out;
  out.grid.resize(steps + 1);
  out.norm_log.resize(steps + 1);
  out.values.reserve(steps + 1);
  const double h = (t1 - t0) / steps;
  Vector y = init;
  double t = t0;
  out.grid(0) = t;
  out.norm_log(0) = y.norm();
  out.values.push_back(y);
  for (int i = 0; i < steps; ++i) {
    Vector k1 = rhs(t) * y;
    Vector k2 = rhs(t + 0.5 * h) * (y + 0.5 * h * k1);
    Vector k3 = rhs(t + 0.5 * h) * (y + 0.5 * h * k2);
    Vector k4 = rhs(t + h) * (y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + (i + 1) * h;
    out.grid(i + 1) = t;
    out.norm_log(i + 1) = y.norm();
    out.values.push_back(y);
  }
  return out;
}

double neck_radius(double t, double eps) { return std::pow(t * t + eps * eps, 0.25); }

RhsFn neck_rhs(double k, double m, double eps) {
  return [=](double t) {
    double r = neck_radius(t, eps);
    Mat2 hmat;
    hmat << m, -k / r, -k / r, -m;
    return Matrix(cplx(0, -1) * hmat);
  };
}

double neck_gronwall_bound(double k, double m, double eps, double t0, double t1, double chi_norm) {
  // 2 ||chi|| int (m + |k|/R) dt by fine midpoint quadrature
  int n = 200000;
  double h = (t1 - t0) / n, acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = t0 + (i + 0.5) * h;
    acc += m + std::abs(k) / neck_radius(t, eps);
  }
  return 2.0 * chi_norm * acc * h;
}

RhsFn torus_s1_rhs(double k, double l, double m, double eps) {
  return [=](double t) {
    double r = neck_radius(t, eps);
    double s = 1.0 / r;
    Mat2 hmat;
    hmat << m, -k / r + cplx(0, 1) * l / s, -k / r - cplx(0, 1) * l / s, -m;
    return Matrix(cplx(0, -1) * hmat);
  };
}

RhsFn cone_rhs(double lambda, double k_half) {
  return [=](double r) {
    Mat2 a;
    a << 2.0 * k_half / r, lambda, -lambda, -2.0 * k_half / r;
    return Matrix(a);
  };
}

Vec2 cone_chi(double r, int which) {
  const double isq = 1.0 / std::sqrt(2.0);
  Vec2 v;
  if (which == +1) {
    v << std::sin(r) * isq, -(std::sin(r) - r * std::cos(r)) / r * isq;
  } else if (which == -1) {
    v << (std::sin(r) - r * std::cos(r)) / r * isq, std::sin(r) * isq;
  } else {
    double a1 = 3 * r * std::cos(r) - (3 - r * r) * std::sin(r);
    double a2 = (15 - 6 * r * r) * std::sin(r) - (15 * r - r * r * r) * std::cos(r);
    v << a1 / (r * r) * isq, a2 / (r * r * r) * isq;
  }
  return v;
}

Vec2 cone_chi_deriv(double r, int which) {
  const double isq = 1.0 / std::sqrt(2.0);
  Vec2 v;
  double s = std::sin(r), c = std::cos(r);
  if (which == +1) {
    v << c * isq, -(r * r * s - s + r * c) / (r * r) * isq;
  } else if (which == -1) {
    v << (r * r * s - s + r * c) / (r * r) * isq, c * isq;
  } else {
    double a1 = 3 * r * c - (3 - r * r) * s;
    double a1p = r * (r * c - s);
    double a2 = (15 - 6 * r * r) * s - (15 * r - r * r * r) * c;
    double a2p = -r * a1;
    v << (a1p * r - 2 * a1) / (r * r * r) * isq, (a2p * r - 3 * a2) / (r * r * r * r) * isq;
  }
  return v;
}

Vec2 cone_psi_plus(double r, double phi) {
  Vec2 v;
  double p32 = std::pow(r, 1.5);
  v << r * std::sin(r) / p32,
      cplx(0, -1) * std::exp(cplx(0, phi)) * (std::sin(r) - r * std::cos(r)) / p32;
  return v;
}

Vec2 cone_psi_minus(double r, double phi) {
  Vec2 v;
  double p32 = std::pow(r, 1.5);
  v << std::exp(cplx(0, -phi)) * (std::sin(r) - r * std::cos(r)) / p32,
      cplx(0, 1) * r * std::sin(r) / p32;
  return v;
}

Vec2 cone_psi_k32(double r, double phi) {
  double a1 = 3 * r * std::cos(r) - (3 - r * r) * std::sin(r);
  double a2 = (15 - 6 * r * r) * std::sin(r) - (15 * r - r * r * r) * std::cos(r);
  Vec2 v;
  v << std::exp(cplx(0, phi)) * a1 / std::pow(r, 2.5),
      cplx(0, 1) * std::exp(cplx(0, 2 * phi)) * a2 / std::pow(r, 3.5);
  return v;
}

double cone_F_scalar(double r) {
  double s = std::sin(r), c = std::cos(r);
  return -(s * s / r + (s - r * c) * (s - r * c) / (r * r * r));
}

Matrix cone_F3(double r, double phi) {
  std::vector<Vector> psi = {cone_psi_plus(r, phi), cone_psi_minus(r, phi), cone_psi_k32(r, phi)};
  Matrix f(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) f(i, j) = -(psi[i].adjoint() * psi[j])(0);
  return f;
}

RhsFn cone_s1_rhs(double lambda, double k_half, double l) {
  return [=](double r) {
    double kr = 6.0 * k_half / (5.0 * r);
    double ls = 4.0 * l / (5.0 * r);
    Mat2 a;
    a << kr, lambda - ls, -lambda - ls, -kr;
    return Matrix(a);
  };
}

Vec2 cone_s1_chi(double r, int sign) {
  const double n = 5.0 / std::sqrt(24.0);
  double s = std::sin(r), c = std::cos(r);
  Vec2 v;
  if (sign > 0) {
    v << n * ((1 - 2 * r) * s - r * c) / r, n * ((2 + r) * s - 2 * r * c) / r;
  } else {
    v << n * ((2 - r) * s - 2 * r * c) / r, n * ((1 + 2 * r) * s - r * c) / r;
  }
  return v;
}

Vec2 cone_s1_chi_deriv(double r, int sign) {
  const double n = 5.0 / std::sqrt(24.0);
  double s = std::sin(r), c = std::cos(r);
  auto quot = [&](double u, double up) { return n * (up * r - u) / (r * r); };
  Vec2 v;
  if (sign > 0) {
    double u1 = (1 - 2 * r) * s - r * c, u1p = (r - 2) * s - 2 * r * c;
    double u2 = (2 + r) * s - 2 * r * c, u2p = (1 + 2 * r) * s + r * c;
    v << quot(u1, u1p), quot(u2, u2p);
  } else {
    double u1 = (2 - r) * s - 2 * r * c, u1p = (2 * r - 1) * s - r * c;
    double u2 = (1 + 2 * r) * s - r * c, u2p = (r + 2) * s + 2 * r * c;
    v << quot(u1, u1p), quot(u2, u2p);
  }
  return v;
}

Vec2 cone_s1_psi(double r, double phi, double alpha, int sign) {
  // psi = e^{i l alpha} / sqrt(RS) (e^{i(k-1/2)phi} chi1, i e^{i(k+1/2)phi} chi2),
  // sqrt(RS) = (5/sqrt(24)) r, l = 1
  Vec2 chi = cone_s1_chi(r, sign);
  double pref = std::sqrt(24.0) / (5.0 * r);
  cplx ea = std::exp(cplx(0, alpha));
  Vec2 v;
  if (sign > 0) {
    v << ea * pref * chi(0), ea * pref * cplx(0, 1) * std::exp(cplx(0, phi)) * chi(1);
  } else {
    v << ea * pref * std::exp(cplx(0, -phi)) * chi(0), ea * pref * cplx(0, 1) * chi(1);
  }
  return v;
}

Mat2 cone_s1_F(double r, double phi) {
  Vec2 pp = cone_s1_psi(r, phi, 0.0, +1), pm = cone_s1_psi(r, phi, 0.0, -1);
  Mat2 f;
  f << -(pp.adjoint() * pp)(0), -(pp.adjoint() * pm)(0), -(pm.adjoint() * pp)(0),
      -(pm.adjoint() * pm)(0);
  return f;
}

Mat2 cone_s1_F_limit(double phi) {
  Mat2 f;
  f << -5.0, -4.0 * std::exp(cplx(0, -phi)), -4.0 * std::exp(cplx(0, phi)), -5.0;
  return f;
}

double regge_wheeler_u(double r, double bh_mass) {
  return r + 2.0 * bh_mass * std::log(std::abs(r - 2.0 * bh_mass));
}

namespace {
Matrix schw_radial_matrix(const SchwarzschildParams& par, const ModeSpec& mode, double r) {
  double delta = std::abs(r * r - 2.0 * par.bh_mass * r);
  Mat2 a;
  a << cplx(0, mode.omega) * r * r / delta, 0, 0, cplx(0, -mode.omega) * r * r / delta;
  Mat2 b;
  b << 0, cplx((double)mode.lambda_sep, -mode.m_mass * r),
      cplx(-(double)mode.lambda_sep, -mode.m_mass * r), 0;
  return Matrix(a + b / std::sqrt(delta));
}
}  // namespace

RadialSolution schwarzschild_radial(const SchwarzschildParams& par, const ModeSpec& mode,
                                    double r_lo, double r_hi, int steps, const Vector& init_at_hi) {
  validate_schwarzschild_mode(mode);
  const double horizon = 2.0 * par.bh_mass * (1.0 - par.horizon_cap);
  if (!(0.0 < r_lo && r_lo < r_hi))
    throw std::invalid_argument("schwarzschild_radial: need 0 < r_lo < r_hi");
  if (r_hi > horizon)
    throw std::invalid_argument(
        "schwarzschild_radial: interval touches the horizon (omega term non-integrable)");
  // integrate in s = sqrt(r); dX/ds = 2 s A(s^2) X is regular at s = 0
  auto rhs = [&par, &mode](double s) { return Matrix(2.0 * s * schw_radial_matrix(par, mode, s * s)); };
  RadialSolution sol =
      integrate_mode(rhs, std::sqrt(r_hi), std::sqrt(r_lo), init_at_hi, steps);
  for (int i = 0; i < sol.grid.size(); ++i) sol.grid(i) = sol.grid(i) * sol.grid(i);
  return sol;
}

PacketResult schwarzschild_packet(const SchwarzschildParams& par, double m_mass, int lambda,
                                  double k_half, double omega0, double sigma_omega, int n_omega,
                                  double r_init, double r_lo, double r_hi, const RealVector& times,
                                  int steps) {
  Vector init(2);
  init << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  std::vector<RadialSolution> down(n_omega), up(n_omega);
  std::vector<double> omegas(n_omega), gweight(n_omega);
  for (int i = 0; i < n_omega; ++i) {
    omegas[i] = omega0 - 4.0 * sigma_omega + 8.0 * sigma_omega * i / (n_omega - 1);
    double t = (omegas[i] - omega0) / sigma_omega;
    gweight[i] = std::exp(-0.5 * t * t);
  }
  util::parallel_for(n_omega, [&](int i) {
    ModeSpec mode;
    mode.omega = omegas[i];
    mode.lambda_sep = lambda;
    mode.k_half = k_half;
    mode.m_mass = m_mass;
    down[i] = schwarzschild_radial(par, mode, r_lo, r_init, steps, init);
    // upward: integrate in s from sqrt(r_init) to sqrt(r_hi)
    auto rhs = [&](double s) { return Matrix(2.0 * s * schw_radial_matrix(par, mode, s * s)); };
    up[i] = integrate_mode(rhs, std::sqrt(r_init), std::sqrt(r_hi), init, steps);
    for (int j = 0; j < up[i].grid.size(); ++j) up[i].grid(j) = up[i].grid(j) * up[i].grid(j);
  });

  // assemble the union grid (downward grid is descending in r)
  const int nd = (int)down[0].values.size(), nu = (int)up[0].values.size();
  const int n = nd + nu - 1;
  RealVector rr(n), uu(n);
  for (int j = 0; j < nd; ++j) rr(j) = down[0].grid(nd - 1 - j);
  for (int j = 1; j < nu; ++j) rr(nd - 1 + j) = up[0].grid(j);
  for (int j = 0; j < n; ++j) uu(j) = regge_wheeler_u(rr(j), par.bh_mass);

  PacketResult out;
  out.times = times;
  out.centroids.resize(times.size());
  for (int ti = 0; ti < times.size(); ++ti) {
    double t = times(ti);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (int i = 0; i < n_omega; ++i) {
        const Vector& x =
            j < nd ? down[i].values[nd - 1 - j] : up[i].values[j - (nd - 1)];
        acc += gweight[i] * std::exp(cplx(0, -omegas[i] * t)) * x(1);
      }
      double du = j == 0 ? std::abs(uu(1) - uu(0))
                         : (j == n - 1 ? std::abs(uu(n - 1) - uu(n - 2))
                                       : 0.5 * std::abs(uu(j + 1) - uu(j - 1)));
      double p = std::norm(acc) * du;
      num += uu(j) * p;
      den += p;
    }
    out.centroids(ti) = num / den;
  }
  // least-squares slope
  double tbar = out.times.mean(), cbar = out.centroids.mean();
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < times.size(); ++i) {
    sxx += (out.times(i) - tbar) * (out.times(i) - tbar);
    sxy += (out.times(i) - tbar) * (out.centroids(i) - cbar);
  }
  out.slope = sxy / sxx;
  return out;
}

std::vector<Vector> conformal_rescale(const std::vector<Vector>& values,
                                      const RealVector& f_at_points, int k_dim) {
  if ((int)values.size() != f_at_points.size())
    throw std::invalid_argument("conformal_rescale: length mismatch");
  std::vector<Vector> out;
  out.reserve(values.size());
  const double p = 0.5 * (k_dim - 1);
  for (size_t i = 0; i < values.size(); ++i) out.push_back(std::pow(f_at_points((int)i), p) * values[i]);
  return out;
}

Matrix rescale_correlation(const Matrix& f, double factor) {
  if (factor <= 0.0) throw std::invalid_argument("rescale_correlation: factor must be positive");
  return factor * f;
}

}  // namespace cfl::singular
