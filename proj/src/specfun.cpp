#include "cfl/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace cfl::specfun {

namespace {
constexpr double kEulerGamma = 0.57721566490153286060651209;
using cx = std::complex<double>;

// I0, I1 by the ascending series; converges for the |z| < 8 range we use.
cx series_i0(cx z) {
  cx q = 0.25 * z * z;
  cx term = 1.0, sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / double(k * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

cx series_i1(cx z) {
  cx q = 0.25 * z * z;
  cx term = 0.5 * z, sum = term;
  for (int k = 1; k < 64; ++k) {
    term *= q / double(k * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// K_nu asymptotic expansion, |arg z| < 3pi/2; truncated at the smallest term.
cx asymptotic_k(int nu, cx z) {
  double mu = 4.0 * nu * nu;
  cx sum = 1.0, term = 1.0;
  double prev = 1e300;
  for (int k = 1; k < 40; ++k) {
    double num = mu - double(2 * k - 1) * double(2 * k - 1);
    term *= num / (8.0 * double(k)) / z;
    double mag = std::abs(term);
    if (mag > prev) break;
    sum += term;
    prev = mag;
    if (mag < 1e-18 * std::abs(sum)) break;
  }
  return std::sqrt(M_PI / (2.0 * z)) * std::exp(-z) * sum;
}
}  // namespace

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

double bessel_j1(double x) {
  double v = std::cyl_bessel_j(1.0, std::abs(x));
  return x < 0 ? -v : v;
}

std::complex<double> bessel_k0(std::complex<double> z) {
  if (z.real() <= 0.0 && std::abs(z.imag()) < 1e-300)
    throw std::domain_error("bessel_k0: need Re z > 0");
  if (std::abs(z) < 8.0) {
    cx q = 0.25 * z * z;
    cx term = 1.0, sum = 0.0;
    double h = 0.0;
    for (int k = 1; k < 64; ++k) {
      term *= q / double(k * k);
      h += 1.0 / k;
      sum += term * h;
      if (std::abs(term) * (h + 1.0) < 1e-18 * (std::abs(sum) + 1.0)) break;
    }
    return -(std::log(0.5 * z) + kEulerGamma) * series_i0(z) + sum;
  }
  return asymptotic_k(0, z);
}

std::complex<double> bessel_k1(std::complex<double> z) {
  if (z.real() <= 0.0 && std::abs(z.imag()) < 1e-300)
    throw std::domain_error("bessel_k1: need Re z > 0");
  if (std::abs(z) < 8.0) {
    // K1(z) = 1/z + log(z/2) I1(z) - (z/4) sum_k (psi(k+1)+psi(k+2)) q^k / (k! (k+1)!)
    cx q = 0.25 * z * z;
    cx term = 1.0, sum = 0.0;
    double psi1 = -kEulerGamma, psi2 = 1.0 - kEulerGamma;
    for (int k = 0; k < 64; ++k) {
      if (k > 0) {
        term *= q / double(k * (k + 1));
        psi1 += 1.0 / k;
        psi2 += 1.0 / (k + 1);
      }
      sum += term * (psi1 + psi2);
      if (std::abs(term) * (std::abs(psi1) + std::abs(psi2) + 1.0) < 1e-18 * (std::abs(sum) + 1.0))
        break;
    }
    return 1.0 / z + std::log(0.5 * z) * series_i1(z) - 0.25 * z * sum;
  }
  return asymptotic_k(1, z);
}

}  // namespace cfl::specfun
