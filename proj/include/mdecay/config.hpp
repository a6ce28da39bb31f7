#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "mdecay/channel_model.hpp"
#include "mdecay/dynamics.hpp"

namespace mdecay {

enum class RunKind { Spectral, Trajectory, Oracle, PaperExample };

struct RunConfig {
  RunKind run = RunKind::Trajectory;
  SystemSpec system;
  bool formulation_given = false;
  std::vector<bool> shape_given;  // per channel
  double t_max = 50.0;
  std::size_t n_t = 501;
  double e_max = 40.0;
  std::size_t n_e = 2000;      // points of a spectral scan
  std::size_t nodes = 8000;    // dense quadrature nodes of the spectral table
  std::size_t oracle_bins = 4000;
  WiFormula wi_formula = WiFormula::Spectral;
  std::string output = "mdecay";
  unsigned threads = 1;
};

// key = value lines, '#' comments, and one [channel] block per channel with
// coupling (or width), threshold and shape. Throws ConfigParseError naming
// the line and key.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

// The --qft flag: switches to QFT, and Sill shapes for channels without an
// explicit shape, unless the config already names a formulation.
void apply_qft_flag(RunConfig& cfg);

// Two-channel reference preset.
RunConfig paper_example_config();

std::optional<RunKind> parse_run_kind(const std::string& s);
const char* run_kind_name(RunKind k);

}  // namespace mdecay
