#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mdecay/channel_model.hpp"
#include "mdecay/error.hpp"

namespace mdecay {
namespace {

using std::numbers::pi;

constexpr std::size_t kDenseOrder = 20;
constexpr std::size_t kTailOrder = 48;
constexpr std::size_t kOctaves = 40;
// Largest phase (in radians) a dense panel may carry before max_time is exceeded.
constexpr double kDensePhase = 25.0;

struct PanelSpec {
  double a, b;
  int map;  // 0 linear, +1 sqrt-clustered at a, -1 sqrt-clustered at b
};

bool is_threshold(const SystemSpec& s, double x) {
  for (const auto& c : s.channels)
    if (c.threshold == x) return true;
  return false;
}

void add_panel(const PanelSpec& p, std::size_t order, std::vector<double>& x,
               std::vector<double>& w) {
  const auto& gl = quad::gauss_legendre(order);
  const double len = p.b - p.a;
  for (std::size_t k = 0; k < order; ++k) {
    const double u = 0.5 * (gl.x[k] + 1.0), wu = 0.5 * gl.w[k];
    if (p.map == 0) {
      x.push_back(p.a + len * u);
      w.push_back(wu * len);
    } else if (p.map > 0) {
      x.push_back(p.a + len * u * u);
      w.push_back(wu * 2.0 * len * u);
    } else {
      x.push_back(p.b - len * u * u);
      w.push_back(wu * 2.0 * len * u);
    }
  }
}

std::vector<PanelSpec> dense_panels(const ChannelModel& model, double lo, double hi,
                                    std::size_t n_points, double* widest) {
  const SystemSpec& s = model.spec();
  std::vector<double> cuts{lo, hi};
  for (const auto& c : s.channels)
    if (c.threshold > lo && c.threshold < hi) cuts.push_back(c.threshold);
  if (s.mass > lo && s.mass < hi) cuts.push_back(s.mass);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double n_panels = std::max(1.0, static_cast<double>(n_points) / kDenseOrder);
  const double h = (hi - lo) / n_panels;
  const double m = s.mass;
  const double gw = std::max(model.on_shell_width_total(), 1e-9 * m);

  std::vector<std::pair<double, double>> work;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / h - 1e-9));
    for (std::size_t j = 0; j < n; ++j)
      work.emplace_back(a + (b - a) * j / n, j + 1 == n ? b : a + (b - a) * (j + 1) / n);
  }
  // Narrow peaks: panels near M no wider than half the width or half their distance to M.
  std::vector<PanelSpec> out;
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    const double dist = (m >= a && m <= b) ? 0.0 : std::min(std::abs(a - m), std::abs(b - m));
    if (b - a > std::max(0.5 * gw, 0.5 * dist) && b - a > 1e-12 * m) {
      const double c = 0.5 * (a + b);
      work.emplace_back(a, c);
      work.emplace_back(c, b);
      continue;
    }
    int map = 0;
    if (model.breit_wigner())
      map = 0;
    else if (is_threshold(s, a))
      map = 1;
    else if (is_threshold(s, b))
      map = -1;
    out.push_back({a, b, map});
  }
  std::sort(out.begin(), out.end(), [](const PanelSpec& p, const PanelSpec& q) { return p.a < q.a; });
  *widest = 0.0;
  for (const auto& p : out) *widest = std::max(*widest, p.b - p.a);
  return out;
}

void fill_values(const ChannelModel& model, SpectralTable& t) {
  const std::size_t n = t.energy.size(), nc = model.channels();
  const bool rel = model.relativistic();
  t.d_s.assign(n, 0.0);
  t.d_partial.assign(nc, std::vector<double>(n, 0.0));
  t.outer.assign(nc, std::vector<double>(n, 0.0));
  t.propagator.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double e = t.energy[k];
    const cplx g = model.propagator(e);
    const double g2 = std::norm(g);
    t.propagator[k] = g;
    const double fac = rel ? 2.0 * e * e / pi : 1.0 / (2.0 * pi);
    for (std::size_t i = 0; i < nc; ++i) {
      const double gi = model.gamma(i, e);
      t.d_partial[i][k] = fac * gi * g2;
      t.d_s[k] += t.d_partial[i][k];
      t.outer[i][k] = t.weight[k] * fac * gi;
    }
  }
}

SpectralTable lorentzian_table(std::shared_ptr<const ChannelModel> model, double e_max,
                               std::size_t n_points) {
  SpectralTable t;
  t.model = model;
  t.kind = TableKind::Lorentzian;
  t.e_max = e_max;
  const double m = model->spec().mass;
  const double gam = model->gamma_total(m);
  const double r = std::max(e_max, 10.0 * gam);
  double widest = 0.0;
  auto panels = dense_panels(*model, m - r, m + r, n_points, &widest);
  for (const auto& p : panels) add_panel(p, kDenseOrder, t.energy, t.weight);
  t.n_dense = t.energy.size();
  fill_values(*model, t);
  double sum = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) sum += t.weight[k] * t.d_s[k];
  const double tails = 2.0 * (0.5 - std::atan(2.0 * r / gam) / pi);
  t.norm_defect = std::abs(sum + tails - 1.0);
  t.max_time = std::numeric_limits<double>::infinity();
  return t;
}

}  // namespace

double SpectralTable::branching_ratio(std::size_t i) const {
  if (i >= channels()) throw Error(ErrorCode::ChannelIndexOutOfRange, "channel index");
  if (kind == TableKind::Lorentzian) {
    const double m = model->spec().mass;
    return model->gamma(i, m) / model->gamma_total(m);
  }
  double r = 0.0;
  for (std::size_t k = 0; k < size(); ++k) r += weight[k] * d_partial[i][k];
  return r;
}

SpectralTable build_spectral_table(std::shared_ptr<const ChannelModel> model, double e_max,
                                   std::size_t n_points) {
  if (!model) throw Error(ErrorCode::InvalidArgument, "null model");
  const SystemSpec& s = model->spec();
  bool any = false;
  for (const auto& c : s.channels) any = any || c.coupling > 0;
  if (!any)
    throw Error(ErrorCode::StableStateUnsupported,
                "all couplings vanish: the spectral function is a delta peak");
  if (n_points < 2) throw Error(ErrorCode::InvalidArgument, "n_points must be >= 2");
  if (model->breit_wigner()) return lorentzian_table(model, e_max, n_points);
  if (!(e_max > s.channels.back().threshold) || !(e_max > s.mass))
    throw Error(ErrorCode::InvalidArgument, "E_max must exceed the highest threshold and M");

  SpectralTable t;
  t.model = model;
  t.kind = TableKind::Nodal;
  t.e_max = e_max;
  t.tail_order = kTailOrder;
  double widest = 0.0;
  auto panels = dense_panels(*model, s.channels.front().threshold, e_max, n_points, &widest);
  for (const auto& p : panels) add_panel(p, kDenseOrder, t.energy, t.weight);
  t.n_dense = t.energy.size();
  t.max_time = kDensePhase / widest;
  double a = e_max;
  t.edges.push_back(a);
  for (std::size_t k = 0; k < kOctaves; ++k) {
    add_panel({a, 2 * a, 0}, kTailOrder, t.energy, t.weight);
    a *= 2;
    t.edges.push_back(a);
  }
  // Panels were emitted in order but mapped panels may reverse node order.
  {
    std::vector<std::size_t> idx(t.energy.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t p, std::size_t q) { return t.energy[p] < t.energy[q]; });
    std::vector<double> e2, w2;
    for (auto k : idx) {
      e2.push_back(t.energy[k]);
      w2.push_back(t.weight[k]);
    }
    t.energy.swap(e2);
    t.weight.swap(w2);
  }
  t.half_index = static_cast<std::size_t>(
      std::lower_bound(t.energy.begin(), t.energy.begin() + t.n_dense, 0.5 * e_max) -
      t.energy.begin());
  fill_values(*model, t);

  const std::size_t nc = model->channels();
  t.edge_total.resize(kOctaves);
  t.edge_partial.assign(nc, std::vector<std::array<double, 3>>(kOctaves));
  for (std::size_t k = 0; k < kOctaves; ++k) {
    const double e = t.edges[k], h = 1e-3 * e;
    const SpectralValue lo = model->spectral(e - h), mid = model->spectral(e),
                        hi = model->spectral(e + h);
    auto d3 = [h](double l, double c, double r) {
      return std::array<double, 3>{c, (r - l) / (2 * h), (r - 2 * c + l) / (h * h)};
    };
    t.edge_total[k] = d3(lo.total, mid.total, hi.total);
    for (std::size_t i = 0; i < nc; ++i)
      t.edge_partial[i][k] = d3(lo.partial[i], mid.partial[i], hi.partial[i]);
  }

  const bool rel = model->relativistic();
  const std::size_t n = t.size();
  std::vector<double> c(n);
  double norm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    c[k] = t.weight[k] * t.d_s[k];
    norm += c[k];
  }
  t.norm_defect = std::abs(norm - 1.0);

  t.suffix.resize(kOctaves);
  for (std::size_t k = 0; k < kOctaves; ++k) {
    const std::size_t nas = k == 0 ? t.half_index : t.n_dense + (k - 1) * kTailOrder;
    t.suffix[k].assign(nas, 0.0);
  }
  for (std::size_t j = 0; j < t.suffix[kOctaves - 1].size(); ++j) {
    const double xj = t.energy[j];
    double acc = 0.0;
    for (std::size_t k = kOctaves; k-- > 0;) {
      const std::size_t start = t.n_dense + k * kTailOrder;
      for (std::size_t m = start; m < start + kTailOrder; ++m) {
        const double xm = t.energy[m];
        acc += rel ? c[m] / ((xm - xj) * (xm + xj)) : c[m] / (xm - xj);
      }
      if (j < t.suffix[k].size()) t.suffix[k][j] = acc;
    }
  }
  return t;
}

}  // namespace mdecay
