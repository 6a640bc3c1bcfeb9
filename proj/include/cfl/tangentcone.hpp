#ifndef CFL_TANGENTCONE_HPP
#define CFL_TANGENTCONE_HPP

#include <optional>
#include <string>
#include <vector>

#include "cfl/builders.hpp"
#include "cfl/clifford.hpp"

namespace cfl::tangentcone {

enum class FunctionalKind { Chain, SignDiff, ProjDiff };
enum class FunctionalPart { Full, Diag, OffDiag };

struct ConeFunctional {
  FunctionalKind kind = FunctionalKind::Chain;
  FunctionalPart part = FunctionalPart::Full;
  double scale = 1.0;  // multiplies the operator; cone estimates must be scale-free
};

// Frame matrix of A(x_i -> y_j); zero at y = x, symmetric w.r.t. the spin product.
Matrix eval_A(const builders::SampledSystem& sys, int ix, int iy, const ConeFunctional& f);

// Provider route for arbitrary coordinates (translation-invariant backends).
Matrix provider_functional_matrix(const builders::KernelProvider& prov, const ConeFunctional& f,
                                  const Eigen::Vector2d& x, const Eigen::Vector2d& y);

// Operator-norm distance ||F(y_j) - F(x_i)||.
double op_distance(const builders::SampledSystem& sys, int i, int j);

Eigen::VectorXi spin_signs_at(const builders::SampledSystem& sys, int i);

struct ConeWindow {
  double alpha = 0.0;
  double beta = 1.5;  // 0 <= alpha < beta
};

// Conical partition by nearest cell center among unit symmetric matrices.
struct ConeCells {
  std::vector<Matrix> centers;  // HS-normalized
  std::string description;
  int assign(const Matrix& unit_dir) const;
};

// n arcs on the circle {(sigma1 cos + sigma2 sin)/sqrt2} plus off-plane catch cells.
ConeCells circle_cells(int n);
// +-gamma2 atoms plus catch cells on the other Symm directions.
ConeCells atom_cells();
// generic fallback: well-spread random unit symmetric matrices.
ConeCells random_cells(int n, const Eigen::VectorXi& spin_signs, uint64_t seed);

struct ConeMeasureEstimate {
  std::vector<Matrix> directions;  // one per nonempty cell, unit HS norm
  std::vector<double> weights;
  std::vector<int> cell_index;
  std::vector<double> delta_used;
  RealVector delta_ladder;
  std::string cells_desc;

  double total() const;
};

// Windowed, ladder-based surrogate of the conical limsup measure. The ladder
// defaults to 6 rungs at factor 0.5 below 10x the median nearest-neighbor
// distance of the samples.
ConeMeasureEstimate estimate_cone_measure(const builders::SampledSystem& sys, int ix,
                                          const ConeFunctional& f,
                                          const std::optional<ConeWindow>& window,
                                          const ConeCells& cells,
                                          std::optional<RealVector> ladder = std::nullopt);

// L(U) = sum_cells w ||pi_U e||^2_HS; with restrict_ac, directions are first
// projected onto AC(s_x) (finite-sample surrogate of the AC-restricted integral).
double L_functional(const std::vector<Matrix>& u_basis, const ConeMeasureEstimate& mu,
                    const std::optional<Eigen::VectorXi>& restrict_ac_signs = std::nullopt);

struct MaximizeResult {
  clifford::CliffordSubspace maximizer;
  RealVector param;
  double value = 0.0;
  bool unique = false;
  bool degenerate = false;
};

MaximizeResult maximize_clifford(const ConeMeasureEstimate& mu,
                                 const clifford::ExtensionFamily& family, int grid_n = 64,
                                 double separation_tol = 1e-3);

struct SectionResult {
  std::vector<MaximizeResult> per_point;
  double continuity_gap = 0.0;  // max Grassmann distance between adjacent points
  bool aborted = false;         // degenerate point encountered
};

SectionResult tangential_section(const builders::SampledSystem& sys, const ConeFunctional& f,
                                 const clifford::ExtensionFamily& family,
                                 const std::vector<int>& points,
                                 const std::optional<ConeWindow>& window, const ConeCells& cells);

struct AnticommuteCheck {
  double max_residual = 0.0;
  bool skipped = false;
  std::string warning;
};

// Max over support directions e of ||{s_x, e}|| for a SignDiff cone estimate;
// requires a window with beta < 2, else skipped with a warning.
AnticommuteCheck window_anticommute_check(const builders::SampledSystem& sys, int ix,
                                          const ConeWindow& window, const ConeCells& cells);

}  // namespace cfl::tangentcone

#endif
