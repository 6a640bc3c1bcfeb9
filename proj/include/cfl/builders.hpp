#ifndef CFL_BUILDERS_HPP
#define CFL_BUILDERS_HPP

#include <memory>
#include <optional>
#include <vector>

#include "cfl/opcore.hpp"
#include "cfl/types.hpp"

namespace cfl::builders {

// Analytic kernel of the fermionic operator for the translation-invariant
// two-dimensional examples. Coordinates are (t, x) resp. (x1, x2).
class KernelProvider {
 public:
  virtual ~KernelProvider() = default;
  // P(z', z) as a 2x2 matrix on the fibre model Y.
  virtual Mat2 eval_P(const Eigen::Vector2d& zp, const Eigen::Vector2d& z) const = 0;
  // The two nonzero eigenvalues (nu1, nu2) of P(z, z), nu1 <= nu2.
  virtual Eigen::Vector2d eval_nu() const = 0;
  // Gram matrix of the fibre spin scalar product (identity or gamma0).
  virtual Mat2 fibre_gram() const = 0;
  virtual bool riemannian() const = 0;
  virtual double mass() const = 0;
};

struct Sample {
  RealVector coords;
  double weight = 0.0;
  std::shared_ptr<const opcore::FermionPoint> point;  // null for provider-backed samples
};

// A weighted operator set with source coordinates; (H, F, rho) at desk scale.
struct SampledSystem {
  HilbertModel hilbert;
  SpinSignature signature;
  std::vector<Sample> samples;
  std::shared_ptr<const KernelProvider> provider;
  double total_measure = 0.0;
  std::vector<opcore::SpinSpace> spin;  // cached per sample for matrix-backed systems

  bool matrix_backed() const { return !samples.empty() && samples.front().point != nullptr; }
  void validate() const;  // weight sum, point invariants
};

enum class SphereKind { Single, Disjoint, Intersecting };

struct SphereParams {
  SphereKind kind = SphereKind::Single;
  int subdivisions = 2;  // icosphere subdivision level
  double tau_plus = 2.0, tau_minus = 1.5;  // for the disjoint kind, > 1
};

SampledSystem build_dirac_sphere(const SphereParams& params);

// Scalar field on the flat torus T^2, H = span{e^{ikx} : |k|^2 <= L}.
SampledSystem build_torus_scalar(double cutoff, int grid_n);

// Plane-wave system on M_nodes equispaced momenta; samples at the given
// coordinates (weights uniform). Also carries the Bessel-kernel provider.
SampledSystem build_euclidean_plane(double mass, int m_nodes,
                                    const std::vector<Eigen::Vector2d>& coords);

// Discrete local correlation matrix F(z) of the plane system (m_nodes x m_nodes).
Matrix plane_discrete_F(double mass, int m_nodes, const Eigen::Vector2d& z);

// i m xi.sigma J1(m|xi|)/(m|xi|) - J0(m|xi|), xi = z' - z.
Mat2 eval_plane_kernel(double mass, const Eigen::Vector2d& zp, const Eigen::Vector2d& z);

std::shared_ptr<KernelProvider> make_plane_provider(double mass);
std::shared_ptr<KernelProvider> make_chiral_provider(double mass, double tau);

enum class MinkowskiMode { Quadrature, ClosedForm };

struct MinkowskiParams {
  double mass = 1.0;
  double epsilon = 0.1;     // regularization length, > 0
  double tail_tol = 1e-12;  // quadrature tail target
  MinkowskiMode mode = MinkowskiMode::Quadrature;
};

class MinkowskiProvider : public KernelProvider {
 public:
  explicit MinkowskiProvider(const MinkowskiParams& p);
  Mat2 eval_P(const Eigen::Vector2d& zp, const Eigen::Vector2d& z) const override;
  Eigen::Vector2d eval_nu() const override;
  Mat2 fibre_gram() const override { return mats::gamma0(); }
  bool riemannian() const override { return false; }
  double mass() const override { return par_.mass; }

  Mat2 eval_P_quadrature(const Eigen::Vector2d& xi) const;  // xi = z' - z
  Mat2 eval_P_closed(const Eigen::Vector2d& xi) const;
  Eigen::Vector2d eval_nu_quadrature() const;
  const MinkowskiParams& params() const { return par_; }

 private:
  MinkowskiParams par_;
  Eigen::Vector2d nu_;
};

std::shared_ptr<MinkowskiProvider> make_minkowski_provider(const MinkowskiParams& p);

// Lattice (kappa Z)^2 mod 2pi with the three-dimensional plane-wave frame.
SampledSystem build_torus_lattice(double kappa);
Matrix lattice_F(const Eigen::Vector2d& z);

// Provider-backed sample cloud on a polar coordinate grid around `center`;
// sample 0 is the center itself.
SampledSystem provider_system_with_polar_grid(std::shared_ptr<const KernelProvider> provider,
                                              const Eigen::Vector2d& center, double rmax, int n_r,
                                              int n_t);

// ---- provider-side frame algebra (canonical frames f_a = iota e_a / nu_a) ----

struct PairFrames {
  Mat2 P_xy, P_yx;        // P(x,y), P(y,x)
  Eigen::Vector2d nu;     // frame eigenvalues (same at x and y)
  Eigen::VectorXi signs;  // -sign(nu)
};

PairFrames pair_frames(const KernelProvider& prov, const Eigen::Vector2d& x,
                       const Eigen::Vector2d& y);

// Operator-norm distance ||F(y) - F(x)|| computed on span(S_x + S_y).
double pair_op_distance(const PairFrames& pf);

// Explicit two-point realization on C^4 with the canonical frames carried over;
// lets the dense operator algebra be cross-checked against the P formulas.
struct PairEmbedding {
  Matrix x_op, y_op;      // 4x4 self-adjoint
  Matrix frame_x, frame_y;  // 4x2 canonical frames
  Eigen::Vector2d nu;
  Eigen::VectorXi signs;
};

PairEmbedding embed_pair(const KernelProvider& prov, const Eigen::Vector2d& x,
                         const Eigen::Vector2d& y);

// CSV table of kernel entries over a coordinate grid (one row per pair).
std::string tabulate_provider_csv(const KernelProvider& prov, const Eigen::Vector2d& zmin,
                                  const Eigen::Vector2d& zmax, int n);

}  // namespace cfl::builders

#endif
