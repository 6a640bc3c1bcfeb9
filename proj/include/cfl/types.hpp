#ifndef CFL_TYPES_HPP
#define CFL_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfl {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr double kHermTol = 1e-12;

// Eigenvalue signature bound (p positive, q negative), p <= q by convention.
struct SpinSignature {
  int p = 0;
  int q = 0;
  SpinSignature() = default;
  SpinSignature(int p_, int q_) : p(p_), q(q_) {
    if (p < 0 || q < 0 || p > q) throw std::invalid_argument("SpinSignature: need 0 <= p <= q");
  }
};

struct HilbertModel {
  int dim = 0;
  std::vector<std::string> basis_labels;

  HilbertModel() = default;
  explicit HilbertModel(int n) : dim(n) {
    if (n < 1) throw std::invalid_argument("HilbertModel: dim >= 1 required");
    basis_labels.resize(n);
    for (int i = 0; i < n; ++i) basis_labels[i] = "e" + std::to_string(i);
  }
  HilbertModel(int n, std::vector<std::string> labels) : dim(n), basis_labels(std::move(labels)) {
    if (n < 1) throw std::invalid_argument("HilbertModel: dim >= 1 required");
    if ((int)basis_labels.size() != n) throw std::invalid_argument("HilbertModel: label count mismatch");
    for (size_t i = 0; i < basis_labels.size(); ++i)
      for (size_t j = i + 1; j < basis_labels.size(); ++j)
        if (basis_labels[i] == basis_labels[j]) throw std::invalid_argument("HilbertModel: duplicate label");
  }
};

// Fixed 2x2 generator matrices used throughout the two-dimensional examples.
namespace mats {
inline Mat2 id() { return Mat2::Identity(); }
inline Mat2 sigma1() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 sigma2() { Mat2 m; m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Mat2 sigma3() { Mat2 m; m << 1, 0, 0, -1; return m; }
inline Mat2 gamma0() { return sigma3(); }
inline Mat2 gamma1() { Mat2 m; m << 0, 1, -1, 0; return m; }
// gamma2 = i gamma1 gamma0
inline Mat2 gamma2() { Mat2 m; m << 0, cplx(0, -1), cplx(0, -1), 0; return m; }
}  // namespace mats

}  // namespace cfl

#endif
