#include <immintrin.h>

#include "mdecay/kernels.hpp"

namespace mdecay::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

std::complex<double> cauchy_row(const CauchyRow& r) {
  const __m256d xj = _mm256_set1_pd(r.xj);
  const __m256d zjr = _mm256_set1_pd(r.zjr);
  const __m256d zji = _mm256_set1_pd(r.zji);
  const __m256d delta = _mm256_set1_pd(r.delta);
  const __m256d nhalf_t2 = _mm256_set1_pd(-0.5 * r.t * r.t);
  const __m256d nt = _mm256_set1_pd(-r.t);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  // Taylor numerator for b = -t is independent of k.
  const __m256d tb_re = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), zji), nt);
  const __m256d tb_im = _mm256_mul_pd(zjr, nt);
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= r.n; k += 4) {
    const __m256d x = _mm256_loadu_pd(r.x + k);
    const __m256d d = _mm256_sub_pd(x, xj);
    const __m256d small = _mm256_cmp_pd(_mm256_and_pd(d, absmask), delta, _CMP_LT_OQ);
    __m256d w = _mm256_loadu_pd(r.c + k);
    if (r.relativistic) w = _mm256_div_pd(w, _mm256_add_pd(x, xj));
    const __m256d dsafe = _mm256_blendv_pd(d, one, small);
    const __m256d inv = _mm256_div_pd(one, dsafe);
    const __m256d nre = _mm256_sub_pd(_mm256_loadu_pd(r.zr + k), zjr);
    const __m256d nim = _mm256_sub_pd(_mm256_loadu_pd(r.zi + k), zji);
    const __m256d reg_re = _mm256_mul_pd(nre, inv);
    const __m256d reg_im = _mm256_mul_pd(nim, inv);
    const __m256d a = _mm256_mul_pd(d, nhalf_t2);
    const __m256d tay_re = _mm256_add_pd(_mm256_mul_pd(zjr, a), tb_re);
    const __m256d tay_im = _mm256_add_pd(tb_im, _mm256_mul_pd(zji, a));
    const __m256d tre = _mm256_blendv_pd(reg_re, tay_re, small);
    const __m256d tim = _mm256_blendv_pd(reg_im, tay_im, small);
    acc_re = _mm256_fmadd_pd(w, tre, acc_re);
    acc_im = _mm256_fmadd_pd(w, tim, acc_im);
  }
  CauchyRow rest = r;
  rest.x += k;
  rest.c += k;
  rest.zr += k;
  rest.zi += k;
  rest.n -= k;
  const std::complex<double> tail = scalar::cauchy_row(rest);
  return {hsum(acc_re) + tail.real(), hsum(acc_im) + tail.imag()};
}

void secular_sums(const double* d, const double* f2, std::size_t n, double mu, double* s1,
                  double* s2) {
  const __m256d vmu = _mm256_set1_pd(mu);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d inv = _mm256_div_pd(one, _mm256_add_pd(_mm256_loadu_pd(d + k), vmu));
    const __m256d q = _mm256_mul_pd(_mm256_loadu_pd(f2 + k), inv);
    a = _mm256_add_pd(a, q);
    b = _mm256_fmadd_pd(q, inv, b);
  }
  double ta, tb;
  scalar::secular_sums(d + k, f2 + k, n - k, mu, &ta, &tb);
  *s1 = hsum(a) + ta;
  *s2 = hsum(b) + tb;
}

std::complex<double> shifted_cauchy_sum(const double* origin, const double* mu, const double* cr,
                                        const double* ci, std::size_t n, double e) {
  const __m256d ve = _mm256_set1_pd(e);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d sre = _mm256_setzero_pd(), sim = _mm256_setzero_pd();
  std::size_t m = 0;
  for (; m + 4 <= n; m += 4) {
    const __m256d den =
        _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(origin + m), ve), _mm256_loadu_pd(mu + m));
    const __m256d inv = _mm256_div_pd(one, den);
    sre = _mm256_fmadd_pd(_mm256_loadu_pd(cr + m), inv, sre);
    sim = _mm256_fmadd_pd(_mm256_loadu_pd(ci + m), inv, sim);
  }
  const std::complex<double> tail = scalar::shifted_cauchy_sum(origin + m, mu + m, cr + m, ci + m,
                                                               n - m, e);
  return {hsum(sre) + tail.real(), hsum(sim) + tail.imag()};
}

}  // namespace mdecay::simd::avx2
