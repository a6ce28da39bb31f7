#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace mdecay::quad {

using cplx = std::complex<double>;
using Integrand = std::function<cplx(double)>;

struct QuadSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::size_t max_subdivisions = 2000;
};

struct QuadResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

// Adaptive Gauss-Kronrod 10/21 on [a, b]. The substitution x = a + (b-a)s^2
// is always applied, so inverse square-root endpoint singularities at a are
// integrated without special casing.
QuadResult integrate(const Integrand& f, double a, double b, const QuadSpec& spec = {});

// Integral over [a, inf). [a, a+L] is handled as above; the tail uses
// x = c + L u/(1-u) followed by u = 1 - v^2, which keeps integrands decaying
// like x^(-3/2) bounded at v = 0. L = max(1, |a|).
QuadResult integrate_semi_infinite(const Integrand& f, double a, const QuadSpec& spec = {});

// Cauchy principal value of f(x)/(x - pole) over [a, b], evaluated as
// the regular integral of (f(x) - f(pole))/(x - pole) plus f(pole) log((b-pole)/(pole-a)).
QuadResult principal_value(const Integrand& f, double pole, double a, double b,
                           const QuadSpec& spec = {});

// Same over [a, inf). The PV part covers [a, 2 pole - a], the rest is regular.
QuadResult principal_value_semi_infinite(const Integrand& f, double pole, double a,
                                         const QuadSpec& spec = {});

// Integral of f(x) exp(-i omega x) over [a, b]; b may be +inf.
// Long ranges are cut into half-period panels summed with Kahan compensation;
// the infinite case extrapolates the panel partial sums with Wynn's epsilon.
QuadResult fourier_integral(const Integrand& f, double omega, double a, double b,
                            const QuadSpec& spec = {});

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1], ascending
  std::vector<double> w;
};

// n-point Gauss-Legendre rule (cached, thread safe).
const GaussRule& gauss_legendre(std::size_t n);

}  // namespace mdecay::quad
