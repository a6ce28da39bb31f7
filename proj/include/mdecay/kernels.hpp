#pragma once

#include <complex>
#include <cstddef>

// Inner loops that dominate run time: the O(N^2) divided-difference sums of
// the spectral w_i formula and the secular/overlap sums of the Lee oracle.
// Each has a scalar reference and an AVX2 variant picked at runtime.
namespace mdecay::simd {

enum class Backend { Scalar, Avx2 };

// Backend used by the dispatching entry points. Defaults to AVX2 when the CPU
// supports AVX2 and FMA, unless MDECAY_SIMD=scalar is set in the environment.
Backend active_backend();
void set_backend(Backend b);
bool avx2_available();
const char* backend_name(Backend b);

struct CauchyRow {
  const double* x;   // node energies
  const double* c;   // node weights times density
  const double* zr;  // cos(x t)
  const double* zi;  // -sin(x t)
  std::size_t n;
  double xj, zjr, zji, t, delta;
  bool relativistic;  // divide each term by (x_k + x_j) as well
};

// sum_k c_k (z_k - z_j)/(x_k - x_j) [/(x_k + x_j)], with the diagonal window
// |x_k - x_j| < delta replaced by z_j(-i t - (x_k - x_j) t^2 / 2).
std::complex<double> cauchy_row(const CauchyRow& r);

// sum_k f2_k/(d_k + mu) and sum_k f2_k/(d_k + mu)^2.
void secular_sums(const double* d, const double* f2, std::size_t n, double mu, double* s1,
                  double* s2);

// sum_m (cr_m + i ci_m)/((origin_m - e) + mu_m).
std::complex<double> shifted_cauchy_sum(const double* origin, const double* mu, const double* cr,
                                        const double* ci, std::size_t n, double e);

namespace scalar {
std::complex<double> cauchy_row(const CauchyRow& r);
void secular_sums(const double* d, const double* f2, std::size_t n, double mu, double* s1,
                  double* s2);
std::complex<double> shifted_cauchy_sum(const double* origin, const double* mu, const double* cr,
                                        const double* ci, std::size_t n, double e);
}  // namespace scalar

namespace avx2 {
std::complex<double> cauchy_row(const CauchyRow& r);
void secular_sums(const double* d, const double* f2, std::size_t n, double mu, double* s1,
                  double* s2);
std::complex<double> shifted_cauchy_sum(const double* origin, const double* mu, const double* cr,
                                        const double* ci, std::size_t n, double e);
}  // namespace avx2

}  // namespace mdecay::simd
