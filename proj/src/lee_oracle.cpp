#include "mdecay/lee_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mdecay/error.hpp"
#include "mdecay/kernels.hpp"

namespace mdecay {
namespace {

using std::numbers::pi;
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
constexpr int kMaxSecularIterations = 200;

// (1/pi) PV int_{th}^{e_max} Im Pi(E')/(E' - M) dE', the part of the
// dispersive shift the finite grid can represent.
double truncated_shift(const ChannelModel& model, std::size_t i, double m, double e_max) {
  const double th = model.spec().channels[i].threshold;
  auto f = [&](double x) -> cplx { return model.im_pi(i, x); };
  quad::QuadSpec qs = model.quad_spec();
  qs.abs_tol = std::min(qs.abs_tol, 1e-13);
  double v;
  if (m > th)
    v = quad::principal_value(f, m, th, e_max, qs).value.real();
  else
    v = quad::integrate([&](double x) -> cplx { return f(x) / (x - m); }, th, e_max, qs).value.real();
  return v / pi;
}

struct Root {
  std::size_t origin;
  double mu, v2;
};

// Root of g(mu) = (d_o - M_b) + mu - sum_j f2_j/((d_o - d_j) + mu) on the
// bracket (lo, hi), where g increases monotonically.
Root solve_root(const std::vector<double>& pole, const std::vector<double>& f2, double mb,
                std::size_t o, double lo, double hi, std::vector<double>& diff) {
  const std::size_t k = pole.size();
  for (std::size_t j = 0; j < k; ++j) diff[j] = pole[o] - pole[j];
  const double a = pole[o] - mb;
  double mu = 0.5 * (lo + hi), s1 = 0, s2 = 0;
  for (int it = 0; it < kMaxSecularIterations; ++it) {
    simd::secular_sums(diff.data(), f2.data(), k, mu, &s1, &s2);
    const double g = a + mu - s1;
    if (g == 0.0) break;
    if (g > 0)
      hi = mu;
    else
      lo = mu;
    double next = mu - g / (1.0 + s2);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double scale = std::max(std::abs(mu), std::abs(next));
    const bool done = std::abs(next - mu) <= 4 * std::numeric_limits<double>::epsilon() * scale ||
                      hi - lo <= 4 * std::numeric_limits<double>::epsilon() * scale;
    mu = next;
    if (done) {
      simd::secular_sums(diff.data(), f2.data(), k, mu, &s1, &s2);
      return {o, mu, 1.0 / (1.0 + s2)};
    }
  }
  simd::secular_sums(diff.data(), f2.data(), k, mu, &s1, &s2);
  const double g = a + mu - s1;
  if (!std::isfinite(g) || std::abs(g) > 1e-8 * (std::abs(a) + std::abs(mu) + std::abs(s1) + 1.0))
    throw Error(ErrorCode::NonConvergence, "secular equation did not converge");
  return {o, mu, 1.0 / (1.0 + s2)};
}

struct Entry {
  double value;
  int kind;  // 0 secular root, 1 deflated in a merged pole, 2 uncoupled bin
  std::size_t index, sub;
};

}  // namespace

LeeGrid build_grid(const SystemSpec& sys, std::size_t bins, double e_max) {
  if (sys.formulation != Formulation::QM)
    throw Error(ErrorCode::InvalidArgument, "the Lee oracle covers the QM formulation");
  if (bins < 16) throw Error(ErrorCode::InvalidArgument, "bins_per_channel must be >= 16");
  const ChannelModel model(sys);
  if (!(e_max > sys.channels.back().threshold) || !(e_max > sys.mass))
    throw Error(ErrorCode::InvalidArgument, "E_max must exceed the highest threshold and M");
  const std::size_t nc = sys.channels.size();
  const std::size_t d = 1 + nc * bins;
  if (d > kLeeDimensionCap)
    throw Error(ErrorCode::DimensionTooLarge,
                "Lee dimension " + std::to_string(d) + " exceeds cap " +
                    std::to_string(kLeeDimensionCap));

  LeeGrid g;
  g.spec_ = sys;
  g.bins_ = bins;
  g.e_max_ = e_max;
  double shift = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    const double th = sys.channels[i].threshold, de = (e_max - th) / bins;
    g.delta_.push_back(de);
    for (std::size_t n = 0; n < bins; ++n) {
      const double e = th + (n + 0.5) * de;
      g.energy_.push_back(e);
      g.coupling_.push_back(std::sqrt(model.gamma(i, e) * de / (2 * pi)));
    }
    if (sys.channels[i].coupling > 0) shift += truncated_shift(model, i, sys.mass, e_max);
  }
  g.bare_mass_ = sys.mass + shift;

  // Merge coincident coupled bins into single poles.
  std::vector<std::size_t> order(g.energy_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return g.energy_[a] < g.energy_[b]; });
  g.bin_pole_.assign(g.energy_.size(), npos);
  for (std::size_t n : order) {
    const double f = g.coupling_[n];
    if (f == 0.0) continue;
    if (g.pole_.empty() || g.pole_.back() != g.energy_[n]) {
      g.pole_.push_back(g.energy_[n]);
      g.pole_f2_.push_back(0.0);
    }
    g.pole_f2_.back() += f * f;
    g.bin_pole_[n] = g.pole_.size() - 1;
  }

  const std::size_t k = g.pole_.size();
  if (k == 0) {
    g.origin_.push_back(npos);
    g.origin_e_.push_back(g.bare_mass_);
    g.mu_.push_back(0.0);
    g.v2_.push_back(1.0);
    return g;
  }
  const double fnorm = std::sqrt(std::accumulate(g.pole_f2_.begin(), g.pole_f2_.end(), 0.0));
  std::vector<double> diff(k);
  std::vector<Root> roots;
  roots.reserve(k + 1);
  {
    const double lo = std::min(g.bare_mass_, g.pole_[0]) - fnorm - g.pole_[0];
    roots.push_back(solve_root(g.pole_, g.pole_f2_, g.bare_mass_, 0, 1.01 * lo - 1e-300, 0.0, diff));
  }
  for (std::size_t j = 0; j + 1 < k; ++j) {
    const double gap = g.pole_[j + 1] - g.pole_[j], half = 0.5 * gap;
    for (std::size_t q = 0; q < k; ++q) diff[q] = g.pole_[j] - g.pole_[q];
    double s1, s2;
    simd::secular_sums(diff.data(), g.pole_f2_.data(), k, half, &s1, &s2);
    if ((g.pole_[j] - g.bare_mass_) + half - s1 >= 0)
      roots.push_back(solve_root(g.pole_, g.pole_f2_, g.bare_mass_, j, 0.0, half, diff));
    else
      roots.push_back(solve_root(g.pole_, g.pole_f2_, g.bare_mass_, j + 1, -half, 0.0, diff));
  }
  {
    const double hi = std::max(g.bare_mass_, g.pole_[k - 1]) + fnorm - g.pole_[k - 1];
    roots.push_back(solve_root(g.pole_, g.pole_f2_, g.bare_mass_, k - 1, 0.0, 1.01 * hi + 1e-300, diff));
  }
  for (const auto& r : roots) {
    g.origin_.push_back(r.origin);
    g.origin_e_.push_back(g.pole_[r.origin]);
    g.mu_.push_back(r.mu);
    g.v2_.push_back(r.v2);
  }
  return g;
}

double LeeGrid::recurrence_window() const {
  const double de = *std::max_element(delta_.begin(), delta_.end());
  return 0.5 * 2 * pi / de;
}

namespace {

std::vector<Entry> entries(const std::vector<double>& origin_e, const std::vector<double>& mu,
                           const std::vector<double>& pole, const std::vector<std::size_t>& bin_pole,
                           const std::vector<double>& energy) {
  std::vector<Entry> out;
  for (std::size_t m = 0; m < mu.size(); ++m) out.push_back({origin_e[m] + mu[m], 0, m, 0});
  std::vector<std::size_t> members(pole.size(), 0);
  for (std::size_t n = 0; n < bin_pole.size(); ++n) {
    if (bin_pole[n] == npos)
      out.push_back({energy[n], 2, n, 0});
    else if (members[bin_pole[n]]++ > 0)
      out.push_back({pole[bin_pole[n]], 1, bin_pole[n], members[bin_pole[n]] - 1});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Entry& a, const Entry& b) { return a.value < b.value; });
  return out;
}

}  // namespace

std::vector<double> LeeGrid::eigenvalues() const {
  std::vector<double> v;
  for (const auto& e : entries(origin_e_, mu_, pole_, bin_pole_, energy_)) v.push_back(e.value);
  return v;
}

std::vector<double> LeeGrid::eigenvector(std::size_t m) const {
  const auto list = entries(origin_e_, mu_, pole_, bin_pole_, energy_);
  if (m >= list.size()) throw Error(ErrorCode::InvalidArgument, "eigenvector index out of range");
  const Entry& e = list[m];
  std::vector<double> v(dimension(), 0.0);
  if (e.kind == 2) {
    v[1 + e.index] = 1.0;
    return v;
  }
  if (e.kind == 0) {
    const double vs = std::sqrt(v2_[e.index]);
    v[0] = vs;
    for (std::size_t n = 0; n < energy_.size(); ++n)
      if (bin_pole_[n] != npos)
        v[1 + n] = coupling_[n] * vs / ((origin_e_[e.index] - energy_[n]) + mu_[e.index]);
    return v;
  }
  // Column e.sub of the Householder reflection sending f/|f| to the first member.
  std::vector<std::size_t> bins;
  for (std::size_t n = 0; n < energy_.size(); ++n)
    if (bin_pole_[n] == e.index) bins.push_back(n);
  const double fn = std::sqrt(pole_f2_[e.index]);
  std::vector<double> w(bins.size());
  for (std::size_t q = 0; q < bins.size(); ++q) w[q] = coupling_[bins[q]] / fn;
  w[0] -= 1.0;
  const double ww = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  for (std::size_t q = 0; q < bins.size(); ++q)
    v[1 + bins[q]] = (q == e.sub ? 1.0 : 0.0) - 2.0 * w[q] * w[e.sub] / ww;
  return v;
}

std::vector<std::vector<double>> LeeGrid::hamiltonian() const {
  const std::size_t d = dimension();
  std::vector<std::vector<double>> h(d, std::vector<double>(d, 0.0));
  h[0][0] = bare_mass_;
  for (std::size_t n = 0; n < energy_.size(); ++n) {
    h[1 + n][1 + n] = energy_[n];
    h[0][1 + n] = h[1 + n][0] = coupling_[n];
  }
  return h;
}

LeeGrid::State LeeGrid::evolve(double t, bool check_window) const {
  if (!(t >= 0)) throw Error(ErrorCode::InvalidArgument, "t must be >= 0");
  if (check_window && t > recurrence_window())
    throw Error(ErrorCode::RecurrenceWindowExceeded,
                "t = " + std::to_string(t) + " exceeds the recurrence window " +
                    std::to_string(recurrence_window()));
  const std::size_t nr = mu_.size();
  std::vector<double> cr(nr), ci(nr);
  cplx amp = 0.0;
  for (std::size_t m = 0; m < nr; ++m) {
    const double ph = (origin_e_[m] + mu_[m]) * t;
    cr[m] = v2_[m] * std::cos(ph);
    ci[m] = -v2_[m] * std::sin(ph);
    amp += cplx(cr[m], ci[m]);
  }
  State s;
  s.p = std::norm(amp);
  s.w.assign(spec_.channels.size(), 0.0);
  std::vector<double> pole_norm(pole_.size());
  for (std::size_t j = 0; j < pole_.size(); ++j)
    pole_norm[j] =
        std::norm(simd::shifted_cauchy_sum(origin_e_.data(), mu_.data(), cr.data(), ci.data(), nr, pole_[j]));
  for (std::size_t n = 0; n < energy_.size(); ++n)
    if (bin_pole_[n] != npos) s.w[n / bins_] += coupling_[n] * coupling_[n] * pole_norm[bin_pole_[n]];
  return s;
}

OracleFixture make_fixture(const SystemSpec& sys, std::size_t bins, double e_max,
                           const std::vector<double>& times) {
  OracleFixture f;
  f.bins = bins;
  f.e_max = e_max;
  const LeeGrid g = build_grid(sys, bins, e_max);
  f.dimension = g.dimension();
  f.window = g.recurrence_window();
  for (double t : times) {
    const auto s = g.evolve(t);
    f.rows.push_back({t, s.p, s.w});
  }
  const LeeGrid fine = build_grid(sys, 2 * bins, e_max);
  const LeeGrid wide = build_grid(sys, 2 * bins, 2 * e_max);
  for (const auto& r : f.rows) {
    f.dp_bins = std::max(f.dp_bins, std::abs(fine.evolve(r.t).p - r.p));
    f.dp_emax = std::max(f.dp_emax, std::abs(wide.evolve(r.t).p - r.p));
  }
  f.gate_passed = f.dp_bins < kLeeGateTolerance && f.dp_emax < kLeeGateTolerance;
  return f;
}

void write_fixture(const OracleFixture& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  const std::size_t nc = f.rows.empty() ? 0 : f.rows.front().w.size();
  out.precision(12);
  out << "# bins=" << f.bins << " e_max=" << f.e_max << " dimension=" << f.dimension
      << " window=" << f.window << " dp_bins=" << f.dp_bins << " dp_emax=" << f.dp_emax
      << " gate=" << (f.gate_passed ? "pass" : "fail") << " columns=t,p";
  for (std::size_t i = 0; i < nc; ++i) out << ",w" << i + 1;
  out << "\n";
  for (const auto& r : f.rows) {
    out << r.t << " " << r.p;
    for (double w : r.w) out << " " << w;
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

OracleFixture read_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  OracleFixture f;
  std::string line;
  if (!std::getline(in, line) || line.rfind("#", 0) != 0)
    throw Error(ErrorCode::ConfigParseError, path + ": missing header line");
  std::istringstream hs(line.substr(1));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
    if (k == "bins") f.bins = std::stoul(v);
    else if (k == "e_max") f.e_max = std::stod(v);
    else if (k == "dimension") f.dimension = std::stoul(v);
    else if (k == "window") f.window = std::stod(v);
    else if (k == "dp_bins") f.dp_bins = std::stod(v);
    else if (k == "dp_emax") f.dp_emax = std::stod(v);
    else if (k == "gate") f.gate_passed = v == "pass";
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    OracleRow r;
    if (!(ls >> r.t >> r.p))
      throw Error(ErrorCode::ConfigParseError, path + ":" + std::to_string(lineno) + ": bad row");
    double w;
    while (ls >> w) r.w.push_back(w);
    f.rows.push_back(std::move(r));
  }
  return f;
}

}  // namespace mdecay
