#include "mdecay/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace mdecay::simd {
namespace {

Backend detect() {
  const char* env = std::getenv("MDECAY_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Backend::Scalar;
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) b = Backend::Scalar;
  current().store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

std::complex<double> cauchy_row(const CauchyRow& r) {
  return active_backend() == Backend::Avx2 ? avx2::cauchy_row(r) : scalar::cauchy_row(r);
}

void secular_sums(const double* d, const double* f2, std::size_t n, double mu, double* s1,
                  double* s2) {
  if (active_backend() == Backend::Avx2)
    avx2::secular_sums(d, f2, n, mu, s1, s2);
  else
    scalar::secular_sums(d, f2, n, mu, s1, s2);
}

std::complex<double> shifted_cauchy_sum(const double* origin, const double* mu, const double* cr,
                                        const double* ci, std::size_t n, double e) {
  return active_backend() == Backend::Avx2 ? avx2::shifted_cauchy_sum(origin, mu, cr, ci, n, e)
                                           : scalar::shifted_cauchy_sum(origin, mu, cr, ci, n, e);
}

namespace scalar {

std::complex<double> cauchy_row(const CauchyRow& r) {
  double sre = 0.0, sim = 0.0;
  const double half_t2 = 0.5 * r.t * r.t;
  for (std::size_t k = 0; k < r.n; ++k) {
    const double d = r.x[k] - r.xj;
    double w = r.c[k];
    if (r.relativistic) w /= (r.x[k] + r.xj);
    double tre, tim;
    if (std::abs(d) < r.delta) {
      const double a = -d * half_t2, b = -r.t;
      tre = r.zjr * a - r.zji * b;
      tim = r.zjr * b + r.zji * a;
    } else {
      const double inv = 1.0 / d;
      tre = (r.zr[k] - r.zjr) * inv;
      tim = (r.zi[k] - r.zji) * inv;
    }
    sre += w * tre;
    sim += w * tim;
  }
  return {sre, sim};
}

void secular_sums(const double* d, const double* f2, std::size_t n, double mu, double* s1,
                  double* s2) {
  double a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double inv = 1.0 / (d[k] + mu);
    const double q = f2[k] * inv;
    a += q;
    b += q * inv;
  }
  *s1 = a;
  *s2 = b;
}

std::complex<double> shifted_cauchy_sum(const double* origin, const double* mu, const double* cr,
                                        const double* ci, std::size_t n, double e) {
  double sre = 0.0, sim = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double inv = 1.0 / ((origin[m] - e) + mu[m]);
    sre += cr[m] * inv;
    sim += ci[m] * inv;
  }
  return {sre, sim};
}

}  // namespace scalar
}  // namespace mdecay::simd
