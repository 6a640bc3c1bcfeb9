#ifndef CFL_SINGULAR_HPP
#define CFL_SINGULAR_HPP

#include <functional>
#include <vector>

#include "cfl/types.hpp"

namespace cfl::singular {

// Diagonal metric ds^2 = sum_i s_i g_i dx_i^2 with g_i > 0, plus signs first.
struct DiagonalMetric {
  int dim = 0;
  Eigen::VectorXi sign_pattern;
  std::vector<std::function<double(const RealVector&)>> coeffs;
};

using FrameFn = std::function<Matrix(const RealVector&)>;

struct DiracCoefficients {
  std::vector<Matrix> G;  // G^j at the point
  Matrix B;               // zero-order term (i/2 sqrt|g|) d_j (sqrt|g| G^j)
  double anticommutation_residual = 0.0;
};

// B by central differences of sqrt|det g| G^j; G_funcs may carry rotated frames.
DiracCoefficients dirac_coefficients(const DiagonalMetric& metric,
                                     const std::vector<FrameFn>& g_funcs, const RealVector& point,
                                     double h = 1e-5);

struct ModeSpec {
  double omega = 0.0;
  int lambda_sep = 1;    // +-1, +-2, ...
  double k_half = 0.5;   // half-integer angular number
  int l = 0;
  double m_mass = 0.0;
};

void validate_schwarzschild_mode(const ModeSpec& mode);

struct RadialSolution {
  RealVector grid;
  std::vector<Vector> values;
  RealVector norm_log;
  double rescale_power = 0.0;

  double max_norm_drift() const;
};

double sup_difference(const RadialSolution& a, const RadialSolution& b);

using RhsFn = std::function<Matrix(double)>;  // chi'(t) = A(t) chi(t)

// Fixed-step RK4 with a conserved-norm log.
RadialSolution integrate_mode(const RhsFn& rhs, double t0, double t1, const Vector& init,
                              int steps);

// --- neck cylinder: i chi' = [[m, -k/R], [-k/R, -m]] chi, R = (t^2+eps^2)^(1/4)
RhsFn neck_rhs(double k, double m, double eps);
double neck_radius(double t, double eps);
double neck_gronwall_bound(double k, double m, double eps, double t0, double t1, double chi_norm);

// --- torus x S^1: i chi' = [[m, -k/R + i l/S], [-k/R - i l/S, -m]] chi, S = 1/R
RhsFn torus_s1_rhs(double k, double l, double m, double eps);

// --- conical surface (R = r/2): chi' = [[k/R, lambda], [-lambda, -k/R]] chi
RhsFn cone_rhs(double lambda, double k_half);
// explicit bounded solutions at lambda = 1, k = +-1/2 and the k = 3/2 extension
Vec2 cone_psi_plus(double r, double phi);
Vec2 cone_psi_minus(double r, double phi);
Vec2 cone_psi_k32(double r, double phi);
// radial parts and their exact derivatives (for residual checks)
Vec2 cone_chi(double r, int which);        // which: +1, -1, 3 (k=3/2)
Vec2 cone_chi_deriv(double r, int which);
double cone_F_scalar(double r);  // F(r) = cone_F_scalar(r) * id on the 2-dim H
Matrix cone_F3(double r, double phi);  // 3-dim H including the k=3/2 state

// --- cone x S^1 (R = 5r/6, S = 5r/4, l = 1, lambda = 1, k = +-1/2)
RhsFn cone_s1_rhs(double lambda, double k_half, double l);
Vec2 cone_s1_psi(double r, double phi, double alpha, int sign);
Vec2 cone_s1_chi(double r, int sign);
Vec2 cone_s1_chi_deriv(double r, int sign);
Mat2 cone_s1_F(double r, double phi);
Mat2 cone_s1_F_limit(double phi);  // r -> 0 limit

// --- Schwarzschild interior, radial system in s = sqrt(r)
struct SchwarzschildParams {
  double bh_mass = 1.0;  // M
  double horizon_cap = 1e-3;  // reject intervals beyond r = 2M(1 - cap)
};

double regge_wheeler_u(double r, double bh_mass);

// dX/dr = i omega (r^2/|Delta|) diag(1,-1) X + (1/sqrt|Delta|) [[0, lambda - i m r], [-lambda - i m r, 0]] X
RadialSolution schwarzschild_radial(const SchwarzschildParams& par, const ModeSpec& mode,
                                    double r_lo, double r_hi, int steps,
                                    const Vector& init_at_hi);

struct PacketResult {
  RealVector times;
  RealVector centroids;  // of |X_2|^2 in the Regge-Wheeler coordinate
  double slope = 0.0;    // fitted d centroid / dt (expected +1 along t - u)
};

PacketResult schwarzschild_packet(const SchwarzschildParams& par, double m_mass, int lambda,
                                  double k_half, double omega0, double sigma_omega, int n_omega,
                                  double r_init, double r_lo, double r_hi,
                                  const RealVector& times, int steps = 4096);

// --- conformal rescaling
std::vector<Vector> conformal_rescale(const std::vector<Vector>& values,
                                      const RealVector& f_at_points, int k_dim);
Matrix rescale_correlation(const Matrix& f, double factor);

}  // namespace cfl::singular

#endif
