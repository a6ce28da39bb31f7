#pragma once

#include <cstddef>
#include <vector>

#include "mdecay/channel_model.hpp"

namespace mdecay {

// Preset couplings and thresholds with Sill widths in the QFT formulation.
SystemSpec paper_example_qft();

// Rewrites every channel as a Sill channel and switches to QFT.
SystemSpec as_sill(SystemSpec spec);

// Constant-width QM spec whose widths equal the on-shell QFT widths Im Pi_i(M^2)/M.
SystemSpec narrow_width_equivalent(const ChannelModel& qft);

double sill_width(const ChannelModel& model, std::size_t i, double s);
cplx propagator_s(const ChannelModel& model, double s);

// d_S(E) = (2E^2/pi) Gamma(E^2) |G(E^2)|^2 and its channel partials.
SpectralValue spectral_qft(const ChannelModel& model, double e);

// w_i(t) with outer weight 2E^2 Gamma_i/pi and kernel (e^{-iE't} - e^{-iEt})/(E'^2 - E^2).
double channel_probability_qft(const SpectralTable& table, std::size_t i, double t);

}  // namespace mdecay
