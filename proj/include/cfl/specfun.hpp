#ifndef CFL_SPECFUN_HPP
#define CFL_SPECFUN_HPP

#include <complex>

namespace cfl::specfun {

double bessel_j0(double x);
double bessel_j1(double x);

// Modified Bessel K0/K1 for complex argument with Re z > 0.
// Ascending series for |z| < 8, asymptotic expansion beyond.
std::complex<double> bessel_k0(std::complex<double> z);
std::complex<double> bessel_k1(std::complex<double> z);

}  // namespace cfl::specfun

#endif
