#include "mdecay/qft.hpp"

#include <cmath>

#include "mdecay/dynamics.hpp"
#include "mdecay/error.hpp"

namespace mdecay {
namespace {

void require_qft(const ChannelModel& m) {
  if (!m.relativistic()) throw Error(ErrorCode::InvalidArgument, "model is not in the QFT formulation");
}

}  // namespace

SystemSpec paper_example_qft() { return as_sill(paper_example()); }

SystemSpec as_sill(SystemSpec spec) {
  spec.formulation = Formulation::QFT;
  for (auto& c : spec.channels) c.shape = WidthShape::SillRelativistic;
  return spec;
}

SystemSpec narrow_width_equivalent(const ChannelModel& qft) {
  require_qft(qft);
  SystemSpec s;
  s.mass = qft.spec().mass;
  s.form_factor_scale = qft.spec().form_factor_scale;
  s.formulation = Formulation::QM;
  for (std::size_t i = 0; i < qft.channels(); ++i)
    s.channels.push_back({std::sqrt(qft.on_shell_width(i)), 0.0, WidthShape::BreitWignerConstant});
  return s;
}

double sill_width(const ChannelModel& model, std::size_t i, double s) { return model.sill_width(i, s); }

cplx propagator_s(const ChannelModel& model, double s) { return model.propagator_s(s); }

SpectralValue spectral_qft(const ChannelModel& model, double e) {
  require_qft(model);
  bool any = false;
  for (const auto& c : model.spec().channels) any = any || c.coupling > 0;
  if (!any)
    throw Error(ErrorCode::StableStateUnsupported,
                "all couplings vanish: the spectral function is a delta peak");
  return model.spectral(e);
}

double channel_probability_qft(const SpectralTable& table, std::size_t i, double t) {
  require_qft(*table.model);
  return channel_probability_spectral(table, i, t);
}

}  // namespace mdecay
