#ifndef CFL_UTIL_HPP
#define CFL_UTIL_HPP

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cfl/types.hpp"

namespace cfl::util {

// Thread count cap: CFL_THREADS env var, else hardware concurrency.
int thread_count();

// Static partition of [0, n) over the configured threads.
void parallel_for(int n, const std::function<void(int)>& body);

double hs_norm(const Matrix& a);
double hs_dist(const Matrix& a, const Matrix& b);
// Operator (spectral) norm of a general matrix via singular values.
double op_norm(const Matrix& a);
double herm_residual(const Matrix& a);

// Real Hilbert-Schmidt pairing Re Tr(a^dagger b); the ambient metric used for
// projections in Symm(S_x).
double hs_inner(const Matrix& a, const Matrix& b);

std::mt19937_64 rng(uint64_t seed);

// Random Haar-ish unitary (QR of a Gaussian matrix).
Matrix random_unitary(int n, std::mt19937_64& gen);
Matrix random_hermitian(int n, std::mt19937_64& gen);

struct CsvWriter {
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row_raw(const std::string& line);
  bool save(const std::string& path) const;
  std::string str() const;

 private:
  std::string buf_;
  size_t cols_ = 0;
};

bool write_text(const std::string& path, const std::string& content);

}  // namespace cfl::util

#endif
