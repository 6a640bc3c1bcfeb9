#ifndef CFL_OPCORE_HPP
#define CFL_OPCORE_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cfl/types.hpp"

namespace cfl::opcore {

// A point of the operator manifold: finite-rank self-adjoint operator on the
// model Hilbert space, with cached eigendata.
class FermionPoint {
 public:
  FermionPoint(Matrix m, double rank_tol_scale = 1e-9);

  const Matrix& matrix() const { return mat_; }
  int dim() const { return (int)mat_.rows(); }
  const RealVector& eigenvalues() const { return evals_; }  // ascending
  const Matrix& eigenvectors() const { return evecs_; }
  double rank_tol() const { return rank_tol_; }

  int positive_count() const;
  int negative_count() const;

 private:
  Matrix mat_;
  RealVector evals_;
  Matrix evecs_;
  double rank_tol_;
};

// Frame data of the image of a point: pseudo-orthonormal columns f_alpha with
// spin products <f_a|f_b> = s_a delta_ab, where <u|v> = -(u, x v)_H.
struct SpinSpace {
  std::shared_ptr<const FermionPoint> point;
  Matrix frame;          // n_H x d
  RealVector eigvals;    // d nonzero eigenvalues nu_alpha, ascending
  Eigen::VectorXi signs; // s_alpha = -sign(nu_alpha)
  std::vector<std::string> warnings;

  int dim() const { return (int)eigvals.size(); }
  Matrix gram() const;  // diag(signs), the spin Gram G
};

struct SpinOperator {
  Matrix matrix;  // d x d in the pseudo-orthonormal frame
  bool symmetric_flag = false;
};

// G A is Hermitian iff A is symmetric w.r.t. the indefinite spin product.
double spin_symmetry_residual(const Matrix& a, const Eigen::VectorXi& signs);
bool is_spin_symmetric(const Matrix& a, const Eigen::VectorXi& signs, double tol = 1e-10);
Matrix spin_adjoint(const Matrix& a, const Eigen::VectorXi& signs_from, const Eigen::VectorXi& signs_to);

enum class CausalRelation { Timelike, Spacelike, Lightlike };

struct CausalTols {
  double tol_real = 1e-6;
  double tol_modulus = 1e-6;
};

struct CausalSpectrum {
  std::vector<cplx> lambdas;
  CausalRelation relation = CausalRelation::Lightlike;
  CausalTols tols;
  int rank_deficit = 0;  // p+q minus the number of clearly nonzero roots
  bool empty_warning = false;
};

const char* relation_name(CausalRelation r);
// Re-derive the relation from a root list; used by the type invariant check.
CausalRelation classify_lambdas(const std::vector<cplx>& lambdas, const CausalTols& tols);

struct KernelMatrix {
  Matrix matrix;  // d_x x d_y, maps S_y -> S_x in the two frames
  Eigen::VectorXi signs_source;  // of S_y
  Eigen::VectorXi signs_target;  // of S_x
};

struct SignatureError : std::runtime_error {
  RealVector eigenvalues;
  SignatureError(const std::string& msg, RealVector ev)
      : std::runtime_error(msg), eigenvalues(std::move(ev)) {}
};

// F_ij = -<psi_i | psi_j> on the fibre; rejects if the eigenvalue signature
// exceeds (p, q).
FermionPoint local_correlation(const std::vector<Vector>& spinor_values, const Matrix& spin_gram,
                               const SpinSignature& sig, double rank_tol_scale = 1e-9);

SpinSpace spin_space(const FermionPoint& x);
SpinSpace spin_space(std::shared_ptr<const FermionPoint> x);

// Spin space with a caller-chosen pseudo-orthonormal frame (validated).
SpinSpace spin_space_with_frame(std::shared_ptr<const FermionPoint> x, const Matrix& frame,
                                const RealVector& eigvals, const Eigen::VectorXi& signs,
                                double tol = 1e-8);

SpinOperator euclidean_sign(const SpinSpace& s);

CausalSpectrum causal_classify(const FermionPoint& x, const FermionPoint& y,
                               const CausalTols& tols = {});

bool riemannian_spectrum_check(const FermionPoint& x, const FermionPoint& y, double tol = 1e-8);

KernelMatrix kernel(const SpinSpace& sx, const SpinSpace& sy);

SpinOperator closed_chain(const SpinSpace& sx, const SpinSpace& sy);

// Unitary bundle transport S_y -> S_x from the polar decomposition of
// T_xy = (pi_x|S_y)(pi_x|S_y)^*.
Matrix transport(const SpinSpace& sx, const SpinSpace& sy);

// Square root of a spin-symmetric operator: power series when ||T-1|| < 0.5,
// else eigendecomposition (principal branch).
Matrix operator_sqrt(const Matrix& t);

}  // namespace cfl::opcore

#endif
