// Regenerates tests/fixtures/lee_paper_example.txt.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mdecay/error.hpp"
#include "mdecay/lee_oracle.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lee-oracle fixture for the two-channel preset"};
  std::string path = "lee_paper_example.txt";
  std::size_t bins = 4000;
  double e_max = 40.0;
  app.add_option("-o,--output", path, "fixture file");
  app.add_option("--bins", bins, "bins per channel");
  app.add_option("--e-max", e_max, "upper grid edge in units of M");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto fx = mdecay::make_fixture(mdecay::paper_example(), bins, e_max, {1, 5, 10, 20, 50});
    mdecay::write_fixture(fx, path);
    std::cout << "D=" << fx.dimension << " dp_bins=" << fx.dp_bins << " dp_emax=" << fx.dp_emax
              << " gate=" << (fx.gate_passed ? "pass" : "fail") << "\n";
    return fx.gate_passed ? 0 : mdecay::exit_code(mdecay::ErrorCode::ConvergenceGateFailed);
  } catch (const mdecay::Error& e) {
    std::cerr << e.what() << "\n";
    return mdecay::exit_code(e.code());
  }
}
