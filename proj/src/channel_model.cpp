#include "mdecay/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mdecay/error.hpp"

namespace mdecay {

using std::numbers::pi;

SystemSpec paper_example() {
  SystemSpec s;
  s.mass = 1.0;
  s.form_factor_scale = 4.0;
  s.channels = {{1.0, 0.1, WidthShape::SqrtFormFactor}, {0.6, 0.5, WidthShape::SqrtFormFactor}};
  s.formulation = Formulation::QM;
  return s;
}

void validate(const SystemSpec& spec) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (spec.channels.empty()) fail("channel list is empty");
  if (!(spec.mass > 0) || !std::isfinite(spec.mass)) fail("mass must be positive");
  if (!(spec.form_factor_scale > 0)) fail("form_factor_scale must be positive");
  const WidthShape shape0 = spec.channels.front().shape;
  for (std::size_t i = 0; i < spec.channels.size(); ++i) {
    const auto& c = spec.channels[i];
    if (!(c.coupling >= 0) || !std::isfinite(c.coupling)) fail("coupling must be >= 0");
    if (!(c.threshold >= 0) || !std::isfinite(c.threshold)) fail("threshold must be >= 0");
    if (i > 0 && c.threshold < spec.channels[i - 1].threshold)
      fail("thresholds must be nondecreasing");
    if ((c.shape == WidthShape::BreitWignerConstant) != (shape0 == WidthShape::BreitWignerConstant))
      fail("constant widths cannot be mixed with energy-dependent widths");
    if (c.shape == WidthShape::SillRelativistic && spec.formulation != Formulation::QFT)
      fail("Sill widths require the QFT formulation");
    if (spec.formulation == Formulation::QFT && c.shape != WidthShape::SillRelativistic)
      fail("the QFT formulation supports Sill widths only");
  }
  if (shape0 != WidthShape::BreitWignerConstant && !(spec.mass > spec.channels.front().threshold))
    fail("mass must lie above the lowest threshold");
}

double SelfEnergy::re(double e) const { return model->re_pi(channel, e); }
double SelfEnergy::im(double e) const { return model->im_pi(channel, e); }

ChannelModel::ChannelModel(SystemSpec spec, quad::QuadSpec qspec)
    : spec_(std::move(spec)), qspec_(qspec) {
  validate(spec_);
  bw_ = spec_.channels.front().shape == WidthShape::BreitWignerConstant;
  sub_.assign(channels(), 0.0);
  const double m = spec_.mass;
  for (std::size_t i = 0; i < channels(); ++i) sub_[i] = -raw_re_pi(i, m);
  if (bw_) return;
  // Below the lowest threshold the real part of 1/G increases monotonically,
  // so a sign change at threshold means a real pole (bound state).
  const double th = spec_.channels.front().threshold;
  double d;
  if (relativistic()) {
    d = th * th - m * m;
    for (std::size_t i = 0; i < channels(); ++i) d += re_pi(i, th);
  } else {
    d = th - m;
    for (std::size_t i = 0; i < channels(); ++i) d += re_pi(i, th);
  }
  if (d > 0) throw Error(ErrorCode::InvalidArgument, "spec has a bound state below threshold");
}

void ChannelModel::check_index(std::size_t i) const {
  if (i >= channels())
    throw Error(ErrorCode::ChannelIndexOutOfRange, "channel index " + std::to_string(i));
}

double ChannelModel::floor_eps() const {
  return relativistic() ? 1e-12 * spec_.mass * spec_.mass : 1e-12 * spec_.mass;
}

double ChannelModel::sill_width(std::size_t i, double s) const {
  check_index(i);
  const auto& c = spec_.channels[i];
  const double sth = c.threshold * c.threshold;
  if (!(s > sth)) return 0.0;
  return c.coupling * c.coupling * std::sqrt((s - sth) / s);
}

double ChannelModel::gamma(std::size_t i, double e) const {
  check_index(i);
  const auto& c = spec_.channels[i];
  const double g2 = c.coupling * c.coupling;
  switch (c.shape) {
    case WidthShape::BreitWignerConstant:
      return g2;
    case WidthShape::SillRelativistic:
      return e > 0 ? sill_width(i, e * e) : 0.0;
    case WidthShape::SqrtFormFactor:
      if (!(e > c.threshold)) return 0.0;
      {
        const double lam = spec_.form_factor_scale;
        return 2.0 * g2 * std::sqrt(e - c.threshold) / (e * e + lam * lam);
      }
  }
  return 0.0;
}

double ChannelModel::gamma_total(double e) const {
  double g = 0.0;
  for (std::size_t i = 0; i < channels(); ++i) g += gamma(i, e);
  return g;
}

double ChannelModel::im_pi(std::size_t i, double e) const {
  check_index(i);
  if (relativistic()) {
    const auto& c = spec_.channels[i];
    if (!(e > c.threshold)) return 0.0;
    return c.coupling * c.coupling * std::sqrt(e * e - c.threshold * c.threshold);
  }
  return 0.5 * gamma(i, e);
}

double ChannelModel::raw_re_pi(std::size_t i, double e) const {
  check_index(i);
  const auto& c = spec_.channels[i];
  switch (c.shape) {
    case WidthShape::BreitWignerConstant:
      return 0.0;
    case WidthShape::SillRelativistic: {
      // Pi(s) = -g^2 sqrt(s_th - s): purely imaginary above threshold.
      const double s = e * e, sth = c.threshold * c.threshold;
      return s < sth ? -c.coupling * c.coupling * std::sqrt(sth - s) : 0.0;
    }
    case WidthShape::SqrtFormFactor:
      break;
  }
  if (c.coupling == 0.0) return 0.0;
  auto f = [this, i](double x) -> cplx { return im_pi(i, x); };
  quad::QuadSpec qs = qspec_;
  qs.abs_tol = std::min(qs.abs_tol, 1e-13);
  double v;
  if (e > c.threshold) {
    v = quad::principal_value_semi_infinite(f, e, c.threshold, qs).value.real();
  } else {
    auto g = [&](double x) -> cplx { return f(x) / (x - e); };
    v = quad::integrate_semi_infinite(g, c.threshold, qs).value.real();
  }
  return v / pi;
}

SelfEnergy ChannelModel::self_energy(std::size_t i) const {
  check_index(i);
  return SelfEnergy{i, sub_[i], this};
}

cplx ChannelModel::pi_total(double e) const {
  cplx p = 0.0;
  for (std::size_t i = 0; i < channels(); ++i) p += cplx(re_pi(i, e), im_pi(i, e));
  return p;
}

cplx ChannelModel::pi_s(double s) const {
  cplx p = 0.0;
  for (std::size_t i = 0; i < channels(); ++i) {
    const auto& c = spec_.channels[i];
    const double g2 = c.coupling * c.coupling, sth = c.threshold * c.threshold;
    if (s < sth)
      p += cplx(-g2 * std::sqrt(sth - s) + sub_[i], 0.0);
    else
      p += cplx(sub_[i], g2 * std::sqrt(s - sth));
  }
  return p;
}

cplx ChannelModel::propagator_s(double s) const {
  if (!relativistic())
    throw Error(ErrorCode::InvalidArgument, "propagator_s needs the QFT formulation");
  cplx den = s - spec_.mass * spec_.mass + pi_s(s);
  if (den.imag() == 0.0) den += cplx(0.0, floor_eps());
  return 1.0 / den;
}

cplx ChannelModel::propagator(double e) const {
  if (relativistic()) return propagator_s(e * e);
  cplx den = e - spec_.mass + pi_total(e);
  if (den.imag() == 0.0) den += cplx(0.0, floor_eps());
  return 1.0 / den;
}

SpectralValue ChannelModel::spectral(double e) const {
  SpectralValue v;
  v.partial.assign(channels(), 0.0);
  if (relativistic() && !(e > 0)) return v;
  const double g2 = std::norm(propagator(e));
  const double fac = relativistic() ? 2.0 * e * e / pi : 1.0 / (2.0 * pi);
  for (std::size_t i = 0; i < channels(); ++i) {
    v.partial[i] = fac * gamma(i, e) * g2;
    v.total += v.partial[i];
  }
  return v;
}

double ChannelModel::spectral_from_im(double e) const {
  const cplx g = propagator(e);
  return relativistic() ? -(2.0 * e / pi) * g.imag() : -g.imag() / pi;
}

double ChannelModel::on_shell_width(std::size_t i) const {
  check_index(i);
  const double m = spec_.mass;
  return relativistic() ? im_pi(i, m) / m : gamma(i, m);
}

double ChannelModel::on_shell_width_total() const {
  double g = 0.0;
  for (std::size_t i = 0; i < channels(); ++i) g += on_shell_width(i);
  return g;
}

double ChannelModel::support_start() const {
  if (bw_) return -std::numeric_limits<double>::infinity();
  return spec_.channels.front().threshold;
}

quad::QuadResult ChannelModel::integrate_spectrum(const quad::Integrand& g, double from) const {
  const double m = spec_.mass;
  const double w = std::max(on_shell_width_total(), 1e-6 * m);
  std::vector<double> bp;
  for (const auto& c : spec_.channels)
    if (!bw_) bp.push_back(c.threshold);
  for (double x : {m - 4 * w, m - w, m, m + w, m + 4 * w}) bp.push_back(x);
  quad::QuadResult out;
  auto add = [&](const quad::QuadResult& r) {
    out.value += r.value;
    out.error_estimate += r.error_estimate;
    out.evaluations += r.evaluations;
  };
  double lo = from;
  if (std::isinf(from)) {
    lo = m - 4 * w;
    add(quad::integrate_semi_infinite([&](double u) { return g(lo - u); }, 0.0, qspec_));
  }
  std::sort(bp.begin(), bp.end());
  for (double x : bp) {
    if (x <= lo) continue;
    add(quad::integrate(g, lo, x, qspec_));
    lo = x;
  }
  add(quad::integrate_semi_infinite(g, lo, qspec_));
  return out;
}

double ChannelModel::branching_ratio(std::size_t i) const {
  check_index(i);
  if (bw_) return gamma(i, spec_.mass) / gamma_total(spec_.mass);
  const double th = spec_.channels[i].threshold;
  auto f = [this, i](double e) -> cplx {
    const double g = gamma(i, e);
    if (g == 0.0) return 0.0;
    const double fac = relativistic() ? 2.0 * e * e / pi : 1.0 / (2.0 * pi);
    return fac * g * std::norm(propagator(e));
  };
  return integrate_spectrum(f, th).value.real();
}

}  // namespace mdecay
