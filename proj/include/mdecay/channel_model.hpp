#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "mdecay/quadrature.hpp"

namespace mdecay {

using cplx = std::complex<double>;

enum class WidthShape { SqrtFormFactor, BreitWignerConstant, SillRelativistic };
enum class Formulation { QM, QFT };

struct ChannelSpec {
  double coupling = 0.0;   // g; for BreitWignerConstant the width is g^2
  double threshold = 0.0;  // E_th
  WidthShape shape = WidthShape::SqrtFormFactor;
};

struct SystemSpec {
  double mass = 1.0;
  double form_factor_scale = 4.0;  // Lambda
  std::vector<ChannelSpec> channels;
  Formulation formulation = Formulation::QM;
};

// Two channels, g1 = 1, g2 = 0.6, thresholds 0.1 and 0.5, Lambda = 4, M = 1.
SystemSpec paper_example();

// Throws InvalidArgument when the spec breaks an invariant or leaves a bound
// state below the lowest threshold.
void validate(const SystemSpec& spec);

struct SelfEnergy {
  std::size_t channel;
  double subtraction;  // C_i
  const class ChannelModel* model;
  double re(double e) const;
  double im(double e) const;
};

struct SpectralValue {
  double total = 0.0;
  std::vector<double> partial;
};

class ChannelModel {
 public:
  explicit ChannelModel(SystemSpec spec, quad::QuadSpec qspec = {});

  const SystemSpec& spec() const { return spec_; }
  std::size_t channels() const { return spec_.channels.size(); }
  bool relativistic() const { return spec_.formulation == Formulation::QFT; }
  bool breit_wigner() const { return bw_; }

  // Widths as functions of energy E (QFT: of s = E^2).
  double gamma(std::size_t i, double e) const;
  double gamma_total(double e) const;
  double sill_width(std::size_t i, double s) const;

  // QM: Im Pi_i = Gamma_i/2 in energy. QFT: Im Pi_i(s) = sqrt(s) Gamma_i(s) at s = E^2.
  double im_pi(std::size_t i, double e) const;
  // Dispersive real part before subtraction.
  double raw_re_pi(std::size_t i, double e) const;
  double subtraction(std::size_t i) const { return sub_[i]; }
  double re_pi(std::size_t i, double e) const { return raw_re_pi(i, e) + sub_[i]; }
  SelfEnergy self_energy(std::size_t i) const;
  cplx pi_total(double e) const;

  // G_S(E) = 1/(E - M + Pi(E)) in QM; G_S(s) = 1/(s - M^2 + Pi(s)) in QFT.
  cplx propagator(double e) const;
  cplx propagator_s(double s) const;

  SpectralValue spectral(double e) const;
  // d_S via -(1/pi) Im G (QM) or -(2E/pi) Im G(E^2) (QFT), for cross-checks.
  double spectral_from_im(double e) const;

  double branching_ratio(std::size_t i) const;
  // Gamma_i at the nominal mass (QFT: Im Pi_i(M^2)/M).
  double on_shell_width(std::size_t i) const;
  double on_shell_width_total() const;

  // Integral of g over [from, inf) with breakpoints at thresholds and near M.
  quad::QuadResult integrate_spectrum(const quad::Integrand& g, double from) const;
  const quad::QuadSpec& quad_spec() const { return qspec_; }

  // Lower edge of the support of d_S.
  double support_start() const;

 private:
  void check_index(std::size_t i) const;
  double floor_eps() const;
  cplx pi_s(double s) const;

  SystemSpec spec_;
  quad::QuadSpec qspec_;
  bool bw_ = false;
  std::vector<double> sub_;
};

enum class TableKind { Nodal, Lorentzian };

// Energy nodes and quadrature weights for d_S. Nodal tables cover
// [E_th,1, E_max] with Gauss-Legendre panels plus octave panels above E_max.
// Lorentzian tables (constant widths) carry closed forms; their nodes are only
// for output and normalization checks.
struct SpectralTable {
  std::shared_ptr<const ChannelModel> model;
  TableKind kind = TableKind::Nodal;
  std::vector<double> energy, weight, d_s;
  std::vector<std::vector<double>> d_partial;
  std::vector<std::vector<double>> outer;  // weight * (Gamma_i/2pi) in QM, weight * 2E^2 Gamma_i/pi in QFT
  std::vector<cplx> propagator;            // G(E) in QM, G(E^2) in QFT
  double norm_defect = 0.0;
  double e_max = 0.0;
  double max_time = 0.0;  // longest t for which the dense panels resolve e^{-iEt}

  std::size_t n_dense = 0;
  std::size_t tail_order = 0;
  std::size_t half_index = 0;  // first dense node at or above E_max/2
  std::vector<double> edges;   // octave boundaries, edges[0] = E_max
  // d_S and its first two derivatives at each edge; same for each partial.
  std::vector<std::array<double, 3>> edge_total;
  std::vector<std::vector<std::array<double, 3>>> edge_partial;
  // suffix[k][j] = sum over nodes m >= n_dense + k*tail_order of c_m kappa(x_m, x_j),
  // kappa = 1/(x_m - x_j) (QM) or 1/(x_m^2 - x_j^2) (QFT), for the outer nodes j
  // that use it when the cut sits at edge k.
  std::vector<std::vector<double>> suffix;

  std::size_t size() const { return energy.size(); }
  std::size_t channels() const { return d_partial.size(); }
  double branching_ratio(std::size_t i) const;  // sum of partial weights
};

SpectralTable build_spectral_table(std::shared_ptr<const ChannelModel> model, double e_max,
                                   std::size_t n_points);

}  // namespace mdecay
