#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mdecay/kernels.hpp"

using namespace mdecay::simd;

namespace {

struct RowData {
  std::vector<double> x, c, zr, zi;
};

RowData random_row(std::size_t n, double t, std::mt19937& rng) {
  std::uniform_real_distribution<double> e(0.1, 40.0), w(0.0, 1.0);
  RowData r;
  for (std::size_t k = 0; k < n; ++k) {
    r.x.push_back(e(rng));
    r.c.push_back(w(rng));
    r.zr.push_back(std::cos(r.x.back() * t));
    r.zi.push_back(-std::sin(r.x.back() * t));
  }
  return r;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar and AVX2 Cauchy rows agree") {
  if (!avx2_available()) {
    MESSAGE("AVX2/FMA not available; only the scalar path is exercised");
    return;
  }
  std::mt19937 rng(3);
  for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 9, 17, 1000, 4099}) {
    for (bool rel : {false, true}) {
      const double t = 7.5;
      auto d = random_row(n, t, rng);
      const std::size_t j = n ? n / 2 : 0;
      // Put a few nodes inside the diagonal window.
      if (n > 4) {
        d.x[1] = d.x[j] + 1e-9;
        d.x[3] = d.x[j];
      }
      const double xj = n ? d.x[j] : 1.0;
      CauchyRow row{d.x.data(), d.c.data(), d.zr.data(), d.zi.data(), n, xj,
                    std::cos(xj * t), -std::sin(xj * t), t, 1e-6, rel};
      const auto a = scalar::cauchy_row(row), b = avx2::cauchy_row(row);
      CHECK(std::abs(a - b) <= 1e-12 * (1 + std::abs(a)));
    }
  }
}

TEST_CASE("diagonal window uses the Taylor limit") {
  const double t = 3.0, xj = 2.0, d = 1e-8;
  std::vector<double> x{xj + d}, c{1.0}, zr{std::cos((xj + d) * t)}, zi{-std::sin((xj + d) * t)};
  CauchyRow row{x.data(), c.data(), zr.data(), zi.data(), 1, xj, std::cos(xj * t), -std::sin(xj * t), t, 1e-6,
                false};
  const std::complex<double> zj = std::polar(1.0, -xj * t);
  const auto expect = zj * std::complex<double>(-d * t * t / 2, -t);
  CHECK(std::abs(scalar::cauchy_row(row) - expect) < 1e-14);
}

TEST_CASE("secular sums agree across backends") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3, 3), w(0, 1);
  for (std::size_t n : {1, 2, 6, 13, 64, 1001}) {
    std::vector<double> d(n), f2(n);
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = u(rng);
      f2[k] = w(rng);
    }
    const double mu = 0.0123;
    double a1, a2, b1 = 0, b2 = 0;
    scalar::secular_sums(d.data(), f2.data(), n, mu, &a1, &a2);
    double r1 = 0, r2 = 0;
    for (std::size_t k = 0; k < n; ++k) {
      r1 += f2[k] / (d[k] + mu);
      r2 += f2[k] / ((d[k] + mu) * (d[k] + mu));
    }
    CHECK(a1 == doctest::Approx(r1).epsilon(1e-12));
    CHECK(a2 == doctest::Approx(r2).epsilon(1e-12));
    if (avx2_available()) {
      avx2::secular_sums(d.data(), f2.data(), n, mu, &b1, &b2);
      CHECK(std::abs(a1 - b1) <= 1e-11 * (std::abs(a1) + a2));
      CHECK(b2 == doctest::Approx(a2).epsilon(1e-12));
    }
  }
}

TEST_CASE("shifted Cauchy sums agree across backends") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0, 10), s(-0.01, 0.01), w(-1, 1);
  for (std::size_t n : {1, 4, 5, 31, 2048}) {
    std::vector<double> o(n), mu(n), cr(n), ci(n);
    for (std::size_t k = 0; k < n; ++k) {
      o[k] = u(rng);
      mu[k] = s(rng);
      cr[k] = w(rng);
      ci[k] = w(rng);
    }
    const double e = o[0];
    const auto a = scalar::shifted_cauchy_sum(o.data(), mu.data(), cr.data(), ci.data(), n, e);
    std::complex<double> ref = 0;
    for (std::size_t k = 0; k < n; ++k) ref += std::complex<double>(cr[k], ci[k]) / ((o[k] - e) + mu[k]);
    CHECK(std::abs(a - ref) <= 1e-12 * std::abs(ref));
    if (avx2_available()) {
      const auto b = avx2::shifted_cauchy_sum(o.data(), mu.data(), cr.data(), ci.data(), n, e);
      CHECK(std::abs(a - b) <= 1e-11 * std::abs(a));
    }
  }
}

TEST_CASE("backend selection") {
  const Backend before = active_backend();
  set_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  if (avx2_available()) {
    set_backend(Backend::Avx2);
    CHECK(active_backend() == Backend::Avx2);
  }
  set_backend(before);
  CHECK(std::string(backend_name(Backend::Scalar)) == "scalar");
}

}
