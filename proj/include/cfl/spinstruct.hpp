#ifndef CFL_SPINSTRUCT_HPP
#define CFL_SPINSTRUCT_HPP

#include <optional>
#include <vector>

#include "cfl/tangentcone.hpp"

namespace cfl::spinstruct {

using tangentcone::ConeFunctional;

// Linear map u -> d_u A on the coordinate tangent space, from central finite
// differences with one Richardson halving.
struct DirectionalDerivative {
  std::vector<Matrix> partials;  // per coordinate direction
  double step = 0.0;
  double error_estimate = 0.0;

  Matrix apply(const RealVector& u) const;
  int tangent_dim() const { return (int)partials.size(); }
};

DirectionalDerivative dA(const builders::KernelProvider& prov, const ConeFunctional& f,
                         const Eigen::Vector2d& x, double h = 1e-3);

// gamma = pi_Cl o dA, with the coefficient matrix of the projected images in an
// HS-orthonormal basis of Cl; bijective iff that matrix has full rank.
struct SpinStructureMap {
  std::vector<Matrix> gamma;   // gamma(e_i), projected onto Cl
  RealMatrix coefficients;     // dim(Cl) x k
  bool bijective = false;
  RealMatrix induced_metric;   // k x k, {gamma(u),gamma(v)} = 2 g(u,v) id
  int metric_pos = 0, metric_neg = 0;
};

SpinStructureMap gamma_map(const DirectionalDerivative& d, const clifford::CliffordSubspace& cl,
                           double rank_tol = 1e-6);

RealMatrix induced_metric(const std::vector<Matrix>& gamma_ops);

// || {s_x, d A_signdiff(u)} || along a shrinking finite-difference ladder.
std::vector<double> sign_derivative_anticommute(const builders::KernelProvider& prov,
                                                const Eigen::Vector2d& x, const RealVector& u,
                                                const RealVector& h_ladder);

// Time-direction functionals.
cplx B_functional(const builders::KernelProvider& prov, const Eigen::Vector2d& z,
                  const Eigen::Vector2d& zp);
double E_functional(const builders::KernelProvider& prov, const Eigen::Vector2d& z,
                    const Eigen::Vector2d& zp);

struct EClosedFormCheck {
  double lhs = 0.0, rhs = 0.0, relerr = 0.0;
};

// E against i c Tr(z pi_z' pi_z z' - z z' pi_z pi_z'), c = 4 nu1^2 nu2^2/(nu2-nu1)^2.
EClosedFormCheck e_closedform_check(const builders::KernelProvider& prov, const Eigen::Vector2d& z,
                                    const Eigen::Vector2d& zp);

// Sign-difference functional augmented by the time-direction term
// s_x int_{B_delta(y)} E(x, theta) drho(theta); makes dA injective.
// If `samples` is given, the ball integral uses those weights, else a 16-point
// product Gauss rule on the coordinate ball.
DirectionalDerivative time_augmented_dA(const builders::KernelProvider& prov,
                                        const Eigen::Vector2d& x, double delta, double h = 1e-3,
                                        const builders::SampledSystem* samples = nullptr);

}  // namespace cfl::spinstruct

#endif
