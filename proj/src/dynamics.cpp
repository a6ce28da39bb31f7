#include "mdecay/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "mdecay/error.hpp"
#include "mdecay/kernels.hpp"

namespace mdecay {
namespace {

using std::numbers::pi;

// Octave panels whose lower edge E satisfies E t <= kCutPhase are integrated
// node by node; above the cut, oscillatory contributions come from endpoint
// asymptotics and outer nodes use F = e^{-iEt} G(E) + J with J ~ -a(t)/E
// (QM) or -a(t)/E^2 (QFT).
constexpr double kCutPhase = 40.0;
constexpr double kDiagWindow = 1e-6;
constexpr std::size_t kTauOrder = 8;
constexpr double kTauStep = 0.05;

struct Cut {
  bool active = false;
  std::size_t k = 0;
  std::size_t nres = 0;  // nodes integrated directly in inner sums
  std::size_t nas = 0;   // outer nodes below this index use the full inner sum
  double ec = 0.0;
};

Cut cut_at(const SpectralTable& tb, double t) {
  Cut c;
  c.nres = c.nas = tb.size();
  const std::size_t oct = tb.edges.empty() ? 0 : tb.edges.size() - 1;
  for (std::size_t k = 0; k < oct; ++k) {
    if (tb.edges[k] * t > kCutPhase) {
      c.active = true;
      c.k = k;
      c.nres = tb.n_dense + k * tb.tail_order;
      c.nas = k == 0 ? tb.half_index : tb.n_dense + (k - 1) * tb.tail_order;
      c.ec = tb.edges[k];
      return c;
    }
  }
  return c;
}

// Integral of f e^{-iEt} over [ec, inf) from the three leading endpoint terms.
cplx endpoint_rest(const std::array<double, 3>& f, double ec, double t) {
  const cplx it(0.0, t);
  return std::polar(1.0, -ec * t) * (f[0] / it + f[1] / (it * it) + f[2] / (it * it * it));
}

void check_time(const SpectralTable& tb, double t) {
  if (!(t >= 0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "t must be >= 0");
  if (t > tb.max_time)
    throw Error(ErrorCode::InvalidArgument,
                "t exceeds the range resolved by the spectral table (max " +
                    std::to_string(tb.max_time) + "); refine the energy grid");
}

struct Phases {
  std::vector<double> zr, zi;
};

Phases phases(const SpectralTable& tb, double t, std::size_t n) {
  Phases ph;
  ph.zr.resize(n);
  ph.zi.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double arg = tb.energy[m] * t;
    ph.zr[m] = std::cos(arg);
    ph.zi[m] = -std::sin(arg);
  }
  return ph;
}

// sum_m c_m z_m over resolved nodes plus the endpoint rest.
cplx amplitude_sum(const SpectralTable& tb, const std::vector<double>& dens, const Phases& ph,
                   const Cut& cut) {
  double re = 0.0, im = 0.0;
  for (std::size_t m = 0; m < cut.nres; ++m) {
    const double c = tb.weight[m] * dens[m];
    re += c * ph.zr[m];
    im += c * ph.zi[m];
  }
  return {re, im};
}

cplx nodal_amplitude(const SpectralTable& tb, const std::vector<double>& dens,
                     const std::vector<std::array<double, 3>>& edge, double t) {
  const Cut cut = cut_at(tb, t);
  const Phases ph = phases(tb, t, cut.nres);
  cplx a = amplitude_sum(tb, dens, ph, cut);
  if (cut.active) a += endpoint_rest(edge[cut.k], cut.ec, t);
  return a;
}

// Lorentzian helpers. With u = E - M, d_S = (G/2pi)/(u^2 + G^2/4).
double bw_total(const SpectralTable& tb) {
  return tb.model->gamma_total(tb.model->spec().mass);
}

cplx bw_amplitude(const SpectralTable& tb, double t) {
  const double g = bw_total(tb), m = tb.model->spec().mass;
  const auto& qs = tb.model->quad_spec();
  auto lor = [g](double u) -> cplx { return (g / (2 * pi)) / (u * u + 0.25 * g * g); };
  const double half = quad::fourier_integral(lor, t, 0.0, std::numeric_limits<double>::infinity(), qs)
                          .value.real();
  return std::polar(2.0 * half, -m * t);
}

std::vector<double> bw_probabilities(const SpectralTable& tb, double t) {
  const double g = bw_total(tb), m = tb.model->spec().mass;
  const auto& qs = tb.model->quad_spec();
  const double inf = std::numeric_limits<double>::infinity();
  auto inv = [g](double u) -> cplx { return 1.0 / (u * u + 0.25 * g * g); };
  const double u_int = 2.0 * quad::integrate_semi_infinite(inv, 0.0, qs).value.real();
  const double v_int = 2.0 * quad::fourier_integral(inv, t, 0.0, inf, qs).value.real();
  // |e^{-iEt} - e^{-i z0 t}|^2 with z0 = M - i G/2, integrated against 1/|E - z0|^2.
  const double outer = (1.0 + std::exp(-g * t)) * u_int - 2.0 * std::exp(-0.5 * g * t) * v_int;
  std::vector<double> w(tb.channels());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = tb.model->gamma(i, m) / (2 * pi) * outer;
  return w;
}

// Outer nodes above the cut: F = e^{-iEt} G + J with the leading J.
void asymptotic_outer(const SpectralTable& tb, const Cut& cut, cplx a, double t,
                      std::vector<cplx>& f) {
  const bool rel = tb.model->relativistic();
  for (std::size_t j = cut.nas; j < tb.size(); ++j) {
    const double x = tb.energy[j];
    const cplx z = std::polar(1.0, -x * t);
    f[j] = z * tb.propagator[j] - (rel ? a / (x * x) : a / x);
  }
}

std::vector<double> outer_sum(const SpectralTable& tb, const std::vector<cplx>& f) {
  std::vector<double> w(tb.channels(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < tb.size(); ++j) s += tb.outer[i][j] * std::norm(f[j]);
    w[i] = s;
  }
  return w;
}

std::vector<double> nodal_spectral(const SpectralTable& tb, double t) {
  const bool rel = tb.model->relativistic();
  const std::size_t n = tb.size();
  const Cut cut = cut_at(tb, t);
  const Phases ph = phases(tb, t, n);
  std::vector<double> c(cut.nres);
  for (std::size_t m = 0; m < cut.nres; ++m) c[m] = tb.weight[m] * tb.d_s[m];
  cplx a = amplitude_sum(tb, tb.d_s, ph, cut);
  if (cut.active) a += endpoint_rest(tb.edge_total[cut.k], cut.ec, t);

  std::vector<cplx> f(n, 0.0);
  const double delta = kDiagWindow * tb.model->spec().mass;
  const cplx it(0.0, t);
  for (std::size_t j = 0; j < cut.nas; ++j) {
    const double xj = tb.energy[j];
    simd::CauchyRow row{tb.energy.data(), c.data(), ph.zr.data(), ph.zi.data(), cut.nres,
                        xj, ph.zr[j], ph.zi[j], t, delta, rel};
    cplx v = simd::cauchy_row(row);
    if (cut.active) {
      const cplx zj(ph.zr[j], ph.zi[j]);
      const auto& e = tb.edge_total[cut.k];
      const double ec = cut.ec;
      double kap, dkap;
      if (rel) {
        kap = 1.0 / ((ec - xj) * (ec + xj));
        dkap = -2.0 * ec * kap * kap;
      } else {
        kap = 1.0 / (ec - xj);
        dkap = -kap * kap;
      }
      const double g0 = e[0] * kap, g1 = e[1] * kap + e[0] * dkap;
      v += -zj * tb.suffix[cut.k][j] + std::polar(1.0, -ec * t) * (g0 / it + g1 / (it * it));
    }
    f[j] = v;
  }
  if (cut.active) asymptotic_outer(tb, cut, a, t, f);
  return outer_sum(tb, f);
}

// Cumulative tau integration of a(tau) e^{+-i E tau} for the resolved outer nodes.
class TimeDomainEvolver {
 public:
  explicit TimeDomainEvolver(const SpectralTable& tb) : tb_(tb), rel_(tb.model->relativistic()) {}

  std::vector<double> advance(double t) {
    if (t < tau_) throw Error(ErrorCode::InvalidArgument, "times must be nondecreasing");
    if (t == 0.0) return std::vector<double>(tb_.channels(), 0.0);
    const Cut cut = cut_at(tb_, t);
    if (!init_) init(cut.nas);
    const std::size_t active = std::min(cut.nas, gp_.size());
    const double xmax = active ? tb_.energy[active - 1] : 1.0;
    const auto& gl = quad::gauss_legendre(kTauOrder);
    while (tau_ < t) {
      double h = std::min({kTauStep, 2.0 / xmax, std::max(0.05 * tau_, 1e-6 * t)});
      if (tau_ + 1.0001 * h >= t) h = t - tau_;
      for (std::size_t q = 0; q < kTauOrder; ++q) {
        const double tq = tau_ + 0.5 * h * (gl.x[q] + 1.0);
        const double wq = 0.5 * h * gl.w[q];
        const Cut cq = cut_at(tb_, tq);
        const Phases ph = phases(tb_, tq, std::max(cq.nres, active));
        cplx a = amplitude_sum(tb_, tb_.d_s, ph, cq);
        if (cq.active) a += endpoint_rest(tb_.edge_total[cq.k], cq.ec, tq);
        const cplx wa = wq * a;
        for (std::size_t j = 0; j < active; ++j) {
          const cplx e(ph.zr[j], -ph.zi[j]);  // e^{+i x_j tau}
          gp_[j] += wa * e;
          if (rel_) gm_[j] += wa * std::conj(e);
        }
      }
      tau_ += h;
    }
    tau_ = t;

    std::vector<cplx> f(tb_.size(), 0.0);
    const cplx i1(0.0, 1.0);
    for (std::size_t j = 0; j < active; ++j) {
      const double x = tb_.energy[j];
      const cplx z = std::polar(1.0, -x * t);
      if (rel_)
        f[j] = (-i1 * z * gp_[j] + i1 * std::conj(z) * gm_[j] - 2.0 * i1 * std::sin(x * t) * r_[j]) /
               (2.0 * x);
      else
        f[j] = -i1 * z * gp_[j];
    }
    if (cut.active) {
      Cut c2 = cut;
      c2.nas = active;
      const cplx a = nodal_amplitude(tb_, tb_.d_s, tb_.edge_total, t);
      asymptotic_outer(tb_, c2, a, t, f);
    }
    return outer_sum(tb_, f);
  }

 private:
  void init(std::size_t n_acc) {
    init_ = true;
    gp_.assign(n_acc, 0.0);
    if (rel_) {
      gm_.assign(n_acc, 0.0);
      r_.assign(n_acc, 0.0);
      for (std::size_t j = 0; j < n_acc; ++j) {
        const double xj = tb_.energy[j];
        double s = 0.0;
        for (std::size_t m = 0; m < tb_.size(); ++m)
          s += tb_.weight[m] * tb_.d_s[m] / (tb_.energy[m] + xj);
        r_[j] = s;
      }
    }
  }

  const SpectralTable& tb_;
  bool rel_;
  bool init_ = false;
  double tau_ = 0.0;
  std::vector<cplx> gp_, gm_;
  std::vector<double> r_;
};

void check_channel(const SpectralTable& tb, std::size_t i) {
  if (i >= tb.channels())
    throw Error(ErrorCode::ChannelIndexOutOfRange, "channel index " + std::to_string(i));
}

}  // namespace

cplx survival_amplitude(const SpectralTable& tb, double t) {
  check_time(tb, t);
  if (tb.kind == TableKind::Lorentzian) return bw_amplitude(tb, t);
  return nodal_amplitude(tb, tb.d_s, tb.edge_total, t);
}

double survival_probability(const SpectralTable& tb, double t) {
  return std::norm(survival_amplitude(tb, t));
}

cplx partial_amplitude(const SpectralTable& tb, std::size_t i, double t) {
  check_channel(tb, i);
  check_time(tb, t);
  if (tb.kind == TableKind::Lorentzian) return tb.branching_ratio(i) * bw_amplitude(tb, t);
  return nodal_amplitude(tb, tb.d_partial[i], tb.edge_partial[i], t);
}

std::vector<double> channel_probabilities_spectral(const SpectralTable& tb, double t) {
  check_time(tb, t);
  if (t == 0.0) return std::vector<double>(tb.channels(), 0.0);
  if (tb.kind == TableKind::Lorentzian) return bw_probabilities(tb, t);
  return nodal_spectral(tb, t);
}

double channel_probability_spectral(const SpectralTable& tb, std::size_t i, double t) {
  check_channel(tb, i);
  return channel_probabilities_spectral(tb, t)[i];
}

std::vector<std::vector<double>> channel_probabilities_timedomain(const SpectralTable& tb,
                                                                  const std::vector<double>& times) {
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  if (tb.kind == TableKind::Lorentzian) {
    // The tau integral of a pure exponential is elementary; the outer
    // integral is the same as in the spectral route.
    for (double t : times) {
      check_time(tb, t);
      out.push_back(t == 0.0 ? std::vector<double>(tb.channels(), 0.0) : bw_probabilities(tb, t));
    }
    return out;
  }
  TimeDomainEvolver ev(tb);
  for (double t : times) {
    check_time(tb, t);
    out.push_back(ev.advance(t));
  }
  return out;
}

double channel_probability_timedomain(const SpectralTable& tb, std::size_t i, double t) {
  check_channel(tb, i);
  return channel_probabilities_timedomain(tb, {t}).front()[i];
}

double channel_probability_approx(const SpectralTable& tb, std::size_t i, double t) {
  check_channel(tb, i);
  const cplx a = survival_amplitude(tb, t);
  const cplx ai = partial_amplitude(tb, i, t);
  return tb.branching_ratio(i) - (ai * std::conj(a)).real();
}

std::vector<double> uniform_grid(double t_max, std::size_t n) {
  if (n < 2 || !(t_max > 0)) throw Error(ErrorCode::InvalidArgument, "grid needs n >= 2, t_max > 0");
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
  return g;
}

DecayTrajectory compute_trajectory(const SpectralTable& tb, const std::vector<double>& times,
                                   WiFormula formula, unsigned threads) {
  DecayTrajectory tr;
  tr.formula = formula;
  tr.times = times;
  const std::size_t nt = times.size(), nc = tb.channels();
  tr.p.assign(nt, 0.0);
  tr.w.assign(nc, std::vector<double>(nt, 0.0));
  std::vector<std::vector<double>> td;
  if (formula == WiFormula::TimeDomain) td = channel_probabilities_timedomain(tb, times);

  auto work = [&](std::size_t k) {
    const double t = times[k];
    tr.p[k] = survival_probability(tb, t);
    std::vector<double> w;
    if (formula == WiFormula::Spectral) {
      w = channel_probabilities_spectral(tb, t);
    } else if (formula == WiFormula::TimeDomain) {
      w = td[k];
    } else {
      w.resize(nc);
      for (std::size_t i = 0; i < nc; ++i) w[i] = channel_probability_approx(tb, i, t);
    }
    for (std::size_t i = 0; i < nc; ++i) tr.w[i][k] = w[i];
  };
  threads = std::max(1u, threads);
  if (threads == 1 || nt < 2) {
    for (std::size_t k = 0; k < nt; ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    for (unsigned th = 0; th < threads; ++th) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t k = next.fetch_add(1);
          if (k >= nt || failed) return;
          try {
            work(k);
          } catch (...) {
            if (!failed.exchange(true)) err = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }

  std::vector<double> gam(nc);
  for (std::size_t i = 0; i < nc; ++i) gam[i] = tb.model->on_shell_width(i);
  tr.bw_p.assign(nt, 0.0);
  tr.bw_w.assign(nc, std::vector<double>(nt, 0.0));
  tr.bw_h.assign(nc, std::vector<double>(nt, 0.0));
  double gsum = 0.0;
  for (double g : gam) gsum += g;
  const bool bw_ok = gsum > 0;
  for (std::size_t k = 0; k < nt && bw_ok; ++k) {
    const BwReference r = bw_reference(gam, times[k]);
    tr.bw_p[k] = r.p;
    for (std::size_t i = 0; i < nc; ++i) {
      tr.bw_w[i][k] = r.w[i];
      tr.bw_h[i][k] = r.h[i];
    }
  }
  tr.w_ratio.assign(nt, std::numeric_limits<double>::quiet_NaN());
  if (nc >= 2)
    for (std::size_t k = 0; k < nt; ++k)
      if (tr.w[1][k] != 0.0) tr.w_ratio[k] = tr.w[0][k] / tr.w[1][k];
  if (nt >= 5) decay_density(tr);
  return tr;
}

void decay_density(DecayTrajectory& tr) {
  const std::size_t n = tr.times.size();
  if (n < 5) throw Error(ErrorCode::GridTooCoarse, "decay_density needs at least 5 time points");
  const double dt = (tr.times.back() - tr.times.front()) / static_cast<double>(n - 1);
  for (std::size_t k = 1; k < n; ++k)
    if (std::abs(tr.times[k] - tr.times[k - 1] - dt) > 1e-9 * std::max(1.0, dt) + 1e-12 * tr.times[k])
      throw Error(ErrorCode::InvalidArgument, "decay_density needs a uniform time grid");
  auto deriv = [&](const std::vector<double>& f) {
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k - 1]) / (2.0 * dt);
    return d;
  };
  tr.h = deriv(tr.p);
  for (double& v : tr.h) v = -v;
  tr.h_partial.clear();
  for (const auto& w : tr.w) tr.h_partial.push_back(deriv(w));
  tr.h_ratio.assign(n, std::numeric_limits<double>::quiet_NaN());
  if (tr.h_partial.size() >= 2)
    for (std::size_t k = 0; k < n; ++k)
      if (tr.h_partial[1][k] != 0.0) tr.h_ratio[k] = tr.h_partial[0][k] / tr.h_partial[1][k];
}

ZenoData zeno_coefficients(const ChannelModel& model) {
  ZenoData z;
  double sum = 0.0;
  for (std::size_t i = 0; i < model.channels(); ++i) {
    const auto& c = model.spec().channels[i];
    if (c.shape != WidthShape::SqrtFormFactor)
      throw Error(ErrorCode::DivergentZenoIntegral,
                  "the width integral diverges for constant and Sill widths");
    auto g = [&model, i](double e) -> cplx { return model.gamma(i, e); };
    const double ci = quad::integrate_semi_infinite(g, c.threshold, model.quad_spec()).value.real() /
                      (2.0 * pi);
    z.c.push_back(ci);
    sum += ci;
  }
  z.tau_z = sum > 0 ? 1.0 / std::sqrt(sum) : std::numeric_limits<double>::infinity();
  return z;
}

BwReference bw_reference(const std::vector<double>& gammas, double t) {
  double g = 0.0;
  for (double x : gammas) {
    if (!(x >= 0)) throw Error(ErrorCode::InvalidArgument, "bw_reference needs nonnegative widths");
    g += x;
  }
  if (!(g > 0)) throw Error(ErrorCode::InvalidArgument, "bw_reference needs a positive total width");
  BwReference r;
  const double e = std::exp(-g * t);
  r.p = e;
  for (double x : gammas) {
    r.w.push_back(x / g * (1.0 - e));
    r.h.push_back(x * e);
  }
  return r;
}

}  // namespace mdecay
