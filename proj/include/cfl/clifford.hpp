#ifndef CFL_CLIFFORD_HPP
#define CFL_CLIFFORD_HPP

#include <vector>

#include "cfl/opcore.hpp"
#include "cfl/types.hpp"

namespace cfl::clifford {

// Span of symmetric spin-space operators whose anticommutators are scalars.
struct CliffordSubspace {
  std::vector<Matrix> basis;  // d x d frame matrices
  RealMatrix gram;            // {u_i, u_j} = 2 gram_ij id
  int sig_pos = 0, sig_neg = 0;
  Eigen::VectorXi spin_signs;  // Gram signs of the hosting spin space

  int dim() const { return (int)basis.size(); }
};

// Verifies the anticommutator relations and the non-degenerate gram; throws on
// violation. Riemannian spin spaces must come out with signature (m, 0).
CliffordSubspace check_clifford(const std::vector<Matrix>& ops, const Eigen::VectorXi& spin_signs,
                                double tol = 1e-9);

enum class FamilyKind { CausalExtension, RiemannianPlane };

// Parametrized family of candidate Clifford subspaces at a point with d = 2:
// causal: phi -> span(gamma0, gamma1 cos phi + gamma2 sin phi);
// riemannian: unit normal nv -> {x.sigma : x perp nv}.
struct ExtensionFamily {
  FamilyKind kind = FamilyKind::RiemannianPlane;
  Eigen::VectorXi spin_signs;

  int param_dim() const { return kind == FamilyKind::CausalExtension ? 1 : 2; }
  // param: (phi) for causal; (theta, phi) spherical angles of nv for riemannian
  CliffordSubspace member(const RealVector& param) const;
  std::vector<Matrix> member_basis(const RealVector& param) const;
};

ExtensionFamily extension_family(const opcore::SpinSpace& s);
ExtensionFamily extension_family_from_signs(const Eigen::VectorXi& spin_signs);

struct AcSpace {
  std::vector<Matrix> basis;      // real basis of {u in Symm : {u, s_x} = 0}
  RealMatrix gram;                // Tr(u v)/d pairing
  RealVector gram_eigenvalues;    // all < 0 expected (negative definite)
  bool negative_definite = false;
};

AcSpace ac_space(const opcore::SpinSpace& s);

// Real basis of Symm(S) for the given frame signs (dimension d^2).
std::vector<Matrix> symm_basis(const Eigen::VectorXi& spin_signs);

// v with v^2 = +-1 -> unitary Pin element (v or iv).
Matrix pin_generator(const Matrix& v, const Eigen::VectorXi& spin_signs, double tol = 1e-9);

struct AdjointAction {
  RealMatrix matrix;   // coefficients of g u_j g^{-1} in the basis of K
  double residual = 0; // HS distance of the image from K
};

AdjointAction adjoint_action(const Matrix& g, const CliffordSubspace& k);

struct StabilizerMembership {
  bool in_GK = false;
  bool in_G0 = false;
};

StabilizerMembership stabilizer_membership(const Matrix& u, const CliffordSubspace& k,
                                           double tol = 1e-9);

// Change of pseudo-orthonormal frame in which K's generators take the fixed
// model matrix form. Returns the spin-unitary basis-change matrix C with
// C^-1 k_i C = model_i.
Matrix clifford_compatible_frame(const opcore::SpinSpace& s, const CliffordSubspace& k,
                                 const std::vector<Matrix>& model, double tol = 1e-9);

// Principal-angle (Grassmann) distance between real subspaces of Symm(S_x)
// under the HS metric.
double subspace_distance(const CliffordSubspace& a, const CliffordSubspace& b);
double subspace_distance(const std::vector<Matrix>& a, const std::vector<Matrix>& b);

}  // namespace cfl::clifford

#endif
