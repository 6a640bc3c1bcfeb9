#include "cfl/util.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace cfl::util {

int thread_count() {
  static int cached = [] {
    if (const char* env = std::getenv("CFL_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : (int)hc;
  }();
  return cached;
}

void parallel_for(int n, const std::function<void(int)>& body) {
  int nt = std::min(thread_count(), n);
  if (nt <= 1 || n < 16) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

double hs_norm(const Matrix& a) { return a.norm(); }

double hs_dist(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

double op_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double herm_residual(const Matrix& a) { return (a - a.adjoint()).norm(); }

double hs_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace().real(); }

std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

Matrix random_unitary(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cplx(nd(gen), nd(gen));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    cplx d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

Matrix random_hermitian(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cplx(nd(gen), nd(gen));
  return 0.5 * (g + Matrix(g.adjoint()));
}

CsvWriter::CsvWriter(std::vector<std::string> header) : cols_(header.size()) {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  buf_ = os.str();
}

void CsvWriter::row(const std::vector<double>& values) {
  std::ostringstream os;
  os.precision(15);
  for (size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
  os << "\n";
  buf_ += os.str();
}

void CsvWriter::row_raw(const std::string& line) { buf_ += line + "\n"; }

bool CsvWriter::save(const std::string& path) const { return write_text(path, buf_); }

std::string CsvWriter::str() const { return buf_; }

bool write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) return false;
  f << content;
  return f.good();
}

}  // namespace cfl::util
