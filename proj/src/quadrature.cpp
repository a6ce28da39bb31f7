#include "mdecay/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>

#include "mdecay/error.hpp"

namespace mdecay::quad {
namespace {

// QUADPACK qk21 abscissae and weights.
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077904745295417, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

cplx checked(const Integrand& f, double x) {
  cplx v = f(x);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error(ErrorCode::NonFiniteEvaluation, "integrand not finite at x=" + std::to_string(x));
  return v;
}

Panel gk21(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx fc = checked(f, c);
  cplx resk = fc * kWgk[10];
  cplx resg = 0.0;
  double resabs = std::abs(fc) * kWgk[10];
  cplx fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    fv1[j] = checked(f, c - dx);
    fv2[j] = checked(f, c + dx);
    const cplx s = fv1[j] + fv2[j];
    resk += kWgk[j] * s;
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * s;
  }
  const cplx mean = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  resk *= h;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs((resk - resg * h));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  return {a, b, resk, err};
}

// Global adaptive bisection of the panel with the largest error estimate.
QuadResult adaptive(const Integrand& f, double a, double b, const QuadSpec& spec) {
  if (!(spec.rel_tol > 0) || spec.abs_tol < 0 || spec.max_subdivisions < 1)
    throw Error(ErrorCode::InvalidArgument, "bad QuadSpec");
  std::priority_queue<Panel> heap;
  Panel first = gk21(f, a, b);
  heap.push(first);
  cplx total = first.value;
  double err = first.error;
  std::size_t evals = 21;
  std::vector<Panel> frozen;
  for (std::size_t n = 1;; ++n) {
    if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) break;
    if (heap.empty()) break;
    if (n >= spec.max_subdivisions)
      throw Error(ErrorCode::NonConvergence, "subdivision budget exhausted, error estimate " +
                                                 std::to_string(err));
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      frozen.push_back(p);
      continue;
    }
    Panel l = gk21(f, p.a, m), r = gk21(f, m, p.b);
    evals += 42;
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to avoid drift from the incremental updates.
  cplx sum = 0.0;
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  for (const auto& p : frozen) {
    sum += p.value;
    esum += p.error;
  }
  if (esum > std::max(spec.abs_tol, spec.rel_tol * std::abs(sum)))
    throw Error(ErrorCode::NonConvergence, "roundoff limit reached, error estimate " +
                                               std::to_string(esum));
  return {sum, esum, evals};
}

void accumulate(QuadResult& acc, const QuadResult& r) {
  acc.value += r.value;
  acc.error_estimate += r.error_estimate;
  acc.evaluations += r.evaluations;
}

struct KahanSum {
  double re = 0, im = 0, cre = 0, cim = 0;
  void add(cplx v) {
    double y = v.real() - cre, t = re + y;
    cre = (t - re) - y;
    re = t;
    y = v.imag() - cim;
    t = im + y;
    cim = (t - im) - y;
    im = t;
  }
  cplx value() const { return {re, im}; }
};

// Wynn epsilon extrapolation of a sequence of partial sums.
// Returns the highest even-column estimate and the change from the previous one.
std::pair<cplx, double> wynn(const std::vector<cplx>& s) {
  const std::size_t n = s.size();
  std::vector<cplx> prev(n + 1, 0.0), cur(s.begin(), s.end());
  cplx best = s.back();
  cplx best_prev = n > 1 ? s[n - 2] : s.back();
  for (std::size_t k = 1; cur.size() > 1; ++k) {
    std::vector<cplx> next(cur.size() - 1);
    bool stop = false;
    for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
      const cplx d = cur[j + 1] - cur[j];
      if (std::abs(d) == 0.0) {
        stop = true;
        break;
      }
      next[j] = prev[j + 1] + 1.0 / d;
    }
    if (stop) break;
    if (k % 2 == 0) {
      best_prev = next.size() > 1 ? next[next.size() - 2] : best;
      best = next.back();
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {best, std::abs(best - best_prev)};
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadSpec& spec) {
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "integrate requires a < b");
  const double w = b - a;
  auto g = [&](double s) {
    const double x = a + w * s * s;
    const cplx v = f(x);
    return v == 0.0 ? v : v * (2.0 * w * s);
  };
  return adaptive(g, 0.0, 1.0, spec);
}

QuadResult integrate_semi_infinite(const Integrand& f, double a, const QuadSpec& spec) {
  const double L = std::max(1.0, std::abs(a));
  const double c = a + L;
  QuadResult r = integrate(f, a, c, spec);
  auto g = [&](double v) {
    const double x = c + L * (1.0 / (v * v) - 1.0);
    const cplx fx = f(x);
    if (fx == 0.0) return fx;
    return fx * (2.0 * L / v / v / v);
  };
  accumulate(r, adaptive(g, 0.0, 1.0, spec));
  return r;
}

QuadResult principal_value(const Integrand& f, double pole, double a, double b,
                           const QuadSpec& spec) {
  if (!(a < pole && pole < b))
    throw Error(ErrorCode::PoleOutsideInterval, "pole must lie strictly inside (a, b)");
  const cplx fp = checked(f, pole);
  auto h = [&](double x) -> cplx {
    const double d = x - pole;
    if (d == 0.0) return 0.0;
    return (f(x) - fp) / d;
  };
  QuadResult r = integrate(h, a, pole, spec);
  accumulate(r, integrate(h, pole, b, spec));
  r.value += fp * std::log((b - pole) / (pole - a));
  r.evaluations += 1;
  return r;
}

QuadResult principal_value_semi_infinite(const Integrand& f, double pole, double a,
                                         const QuadSpec& spec) {
  if (!(a < pole)) throw Error(ErrorCode::PoleOutsideInterval, "pole must lie above a");
  const double b = 2.0 * pole - a;
  QuadResult r = principal_value(f, pole, a, b, spec);
  accumulate(r, integrate_semi_infinite([&](double x) { return f(x) / (x - pole); }, b, spec));
  return r;
}

QuadResult fourier_integral(const Integrand& f, double omega, double a, double b,
                            const QuadSpec& spec) {
  const bool infinite = std::isinf(b) && b > 0;
  if (omega == 0.0) return infinite ? integrate_semi_infinite(f, a, spec) : integrate(f, a, b, spec);
  auto g = [&](double x) { return f(x) * std::polar(1.0, -omega * x); };
  const double half = std::numbers::pi / std::abs(omega);
  if (!infinite) {
    if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "fourier_integral requires a < b");
    if (std::abs(omega) * (b - a) <= std::numbers::pi) return integrate(g, a, b, spec);
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / half));
    QuadSpec ps = spec;
    ps.abs_tol = spec.abs_tol / static_cast<double>(n);
    KahanSum sum;
    QuadResult out;
    for (std::size_t k = 0; k < n; ++k) {
      const double lo = a + static_cast<double>(k) * half;
      const double hi = k + 1 == n ? b : a + static_cast<double>(k + 1) * half;
      if (!(hi > lo)) continue;
      QuadResult r = integrate(g, lo, hi, ps);
      sum.add(r.value);
      out.error_estimate += r.error_estimate;
      out.evaluations += r.evaluations;
    }
    out.value = sum.value();
    return out;
  }
  QuadSpec ps = spec;
  ps.abs_tol = spec.abs_tol * 0.01;
  KahanSum sum;
  QuadResult out;
  std::vector<cplx> partial;
  double prev_delta = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < spec.max_subdivisions; ++k) {
    const double lo = a + static_cast<double>(k) * half;
    QuadResult r = integrate(g, lo, lo + half, ps);
    sum.add(r.value);
    out.error_estimate += r.error_estimate;
    out.evaluations += r.evaluations;
    partial.push_back(sum.value());
    if (partial.size() > 30) partial.erase(partial.begin());
    if (partial.size() < 5) continue;
    auto [est, delta] = wynn(partial);
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(est));
    if (delta <= tol && prev_delta <= tol) {
      out.value = est;
      out.error_estimate += delta;
      return out;
    }
    prev_delta = delta;
  }
  throw Error(ErrorCode::NonConvergence, "Fourier tail extrapolation did not settle");
}

const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "gauss_legendre needs n >= 1");
  auto rule = std::make_unique<GaussRule>();
  rule->x.resize(n);
  rule->w.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule->x[n - 1 - i] = x;
    rule->x[i] = -x;
    rule->w[i] = rule->w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule->x[n / 2] = 0.0;
  auto& ref = *rule;
  cache.emplace(n, std::move(rule));
  return ref;
}

}  // namespace mdecay::quad
