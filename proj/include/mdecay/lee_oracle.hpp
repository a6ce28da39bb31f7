#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mdecay/channel_model.hpp"

namespace mdecay {

constexpr std::size_t kLeeDimensionCap = 20000;

// Discretized Lee Hamiltonian: |S> with bare mass M_b coupled to uniform
// energy bins of every channel. H is an arrowhead matrix, so the
// eigenproblem reduces to the secular equation
//   lambda - M_b - sum_n f_n^2/(lambda - E_n) = 0
// and eigenvectors follow in closed form from the eigenvalues.
class LeeGrid {
 public:
  const SystemSpec& spec() const { return spec_; }
  std::size_t bins_per_channel() const { return bins_; }
  double e_max() const { return e_max_; }
  std::size_t dimension() const { return 1 + energy_.size(); }
  double bare_mass() const { return bare_mass_; }

  // Bin data, channel-major: bin n of channel i sits at i*bins + n.
  const std::vector<double>& bin_energy() const { return energy_; }
  const std::vector<double>& bin_coupling() const { return coupling_; }
  std::vector<double> bin_width() const { return delta_; }  // per channel

  // Longest t that stays clear of Poincare recurrences: 0.5*2pi/max(dE).
  double recurrence_window() const;

  // All D eigenvalues, ascending.
  std::vector<double> eigenvalues() const;
  // Eigenvector m (in the order of eigenvalues()) in the basis |S>, bins.
  std::vector<double> eigenvector(std::size_t m) const;
  // Dense Hamiltonian, for cross-checks at small D.
  std::vector<std::vector<double>> hamiltonian() const;

  struct State {
    double p = 1.0;
    std::vector<double> w;
  };
  // Exact evolution of |S>. Throws RecurrenceWindowExceeded past the window
  // unless check_window is false.
  State evolve(double t, bool check_window = true) const;

  friend LeeGrid build_grid(const SystemSpec&, std::size_t, double);

 private:
  SystemSpec spec_;
  std::size_t bins_ = 0;
  double e_max_ = 0.0;
  double bare_mass_ = 0.0;
  std::vector<double> energy_, coupling_, delta_;

  // Distinct coupled poles, ascending, with merged squared couplings.
  std::vector<double> pole_, pole_f2_;
  std::vector<std::size_t> bin_pole_;  // pole index per bin, npos when uncoupled
  // Secular roots: lambda_m = pole_[origin_[m]] + mu_[m].
  std::vector<std::size_t> origin_;
  std::vector<double> origin_e_, mu_, v2_;
};

// Midpoint couplings f_n = sqrt(Gamma_i(E_n) dE/2pi) on bins_per_channel
// uniform bins over [E_th,i, E_max]. M_b is chosen so that the truncated
// dispersive shift vanishes at E = M, matching the subtracted continuum
// self-energy.
LeeGrid build_grid(const SystemSpec& sys, std::size_t bins_per_channel, double e_max);

struct OracleRow {
  double t;
  double p;
  std::vector<double> w;
};

struct OracleFixture {
  std::size_t bins = 0;
  double e_max = 0.0;
  std::size_t dimension = 0;
  double window = 0.0;
  double dp_bins = 0.0;  // max |dp| after doubling the bins
  double dp_emax = 0.0;  // max |dp| after doubling E_max at fixed bin width
  bool gate_passed = false;
  std::vector<OracleRow> rows;
};

constexpr double kLeeGateTolerance = 1e-4;

// Evolves the grid at each t and runs the doubling gate over the same times.
OracleFixture make_fixture(const SystemSpec& sys, std::size_t bins_per_channel, double e_max,
                           const std::vector<double>& times);

void write_fixture(const OracleFixture& f, const std::string& path);
OracleFixture read_fixture(const std::string& path);

}  // namespace mdecay
