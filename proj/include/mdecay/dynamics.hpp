#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mdecay/channel_model.hpp"

namespace mdecay {

enum class WiFormula { Spectral, TimeDomain, Approx };

struct DecayTrajectory {
  std::vector<double> times;
  std::vector<double> p;
  std::vector<std::vector<double>> w;  // w[i][k]
  std::vector<double> h;
  std::vector<std::vector<double>> h_partial;
  std::vector<double> w_ratio, h_ratio;  // channel 1 over channel 2, NaN where undefined
  std::vector<double> bw_p;
  std::vector<std::vector<double>> bw_w, bw_h;
  WiFormula formula = WiFormula::Spectral;
};

struct ZenoData {
  std::vector<double> c;
  double tau_z = 0.0;
};

struct BwReference {
  double p = 1.0;
  std::vector<double> w, h;
};

cplx survival_amplitude(const SpectralTable& table, double t);
double survival_probability(const SpectralTable& table, double t);
cplx partial_amplitude(const SpectralTable& table, std::size_t i, double t);

// Spectral double integral with the divided-difference inner kernel.
double channel_probability_spectral(const SpectralTable& table, std::size_t i, double t);
std::vector<double> channel_probabilities_spectral(const SpectralTable& table, double t);

// Outer energy integral of |int_0^t a(tau) e^{i E tau} dtau|^2.
double channel_probability_timedomain(const SpectralTable& table, std::size_t i, double t);
// Accepts any nondecreasing list of times and integrates cumulatively in tau.
std::vector<std::vector<double>> channel_probabilities_timedomain(const SpectralTable& table,
                                                                  const std::vector<double>& times);

// r_i - Re[a_i(t) a(t)^*].
double channel_probability_approx(const SpectralTable& table, std::size_t i, double t);

std::vector<double> uniform_grid(double t_max, std::size_t n);

DecayTrajectory compute_trajectory(const SpectralTable& table, const std::vector<double>& times,
                                   WiFormula formula = WiFormula::Spectral, unsigned threads = 1);

// Fills h, h_partial and h_ratio by finite differences; needs a uniform grid.
void decay_density(DecayTrajectory& traj);

ZenoData zeno_coefficients(const ChannelModel& model);

BwReference bw_reference(const std::vector<double>& gammas, double t);

}  // namespace mdecay
