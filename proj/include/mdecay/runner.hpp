#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mdecay/config.hpp"
#include "mdecay/dynamics.hpp"

namespace mdecay {

struct PaperSummary {
  std::vector<double> r;          // branching ratios
  std::vector<double> gamma_frac; // Gamma_i(M)/Gamma(M)
  double gamma_ratio = 0.0;       // Gamma_1/Gamma_2
  double r_ratio = 0.0;           // r_1/r_2
};

PaperSummary paper_summary(const SpectralTable& table);
std::string format_summary(const PaperSummary& s);

// Tolerance on |p + sum w_i - 1| quoted in trajectory headers.
constexpr double kUnitarityTolerance = 2e-3;

struct RunResult {
  std::vector<std::string> files;
  std::string summary;
};

// Runs cfg and writes CSVs named <cfg.output>_<kind>.csv.
RunResult run(const RunConfig& cfg, std::ostream& log);

}  // namespace mdecay
