#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mdecay/config.hpp"
#include "mdecay/csv.hpp"
#include "mdecay/error.hpp"

using namespace mdecay;
namespace fs = std::filesystem;

namespace {

const std::string kCli = MDECAY_CLI_PATH;
const std::string kConfigs = MDECAY_CONFIG_DIR;

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("mdecay_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  const fs::path log = scratch() / "stdout.txt";
  const std::string cmd = "'" + kCli + "' " + args + " > '" + log.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string write_config(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode parse_code(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in, "test.cfg");
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

const std::string kChannels = R"([channel]
coupling = 1.0
threshold = 0.1
[channel]
coupling = 0.6
threshold = 0.5
)";
const std::string kSmall = "run = trajectory\nt_max = 6\nn_t = 13\nnodes = 3000\n" + kChannels;

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("reference configs parse") {
  const auto pe = load_config(kConfigs + "/paper_example.cfg");
  CHECK(pe.run == RunKind::PaperExample);
  CHECK(pe.system.channels.size() == 2);
  CHECK(pe.system.channels[1].coupling == 0.6);
  const auto sill = load_config(kConfigs + "/sill_trajectory.cfg");
  CHECK(sill.system.formulation == Formulation::QFT);
  CHECK(sill.system.channels[0].shape == WidthShape::SillRelativistic);
  const auto orc = load_config(kConfigs + "/oracle_check.cfg");
  CHECK(orc.run == RunKind::Oracle);
  CHECK(orc.oracle_bins == 4000);
  CHECK(orc.system.channels[0].shape == WidthShape::SqrtFormFactor);
}

TEST_CASE("parse errors name the line") {
  CHECK(parse_code("run = trajectory\nmass = 1\n") == ErrorCode::ConfigParseError);
  std::istringstream in("mass = 1\nmasss = 2\n[channel]\ncoupling = 1\n");
  try {
    parse_config(in, "x.cfg");
    FAIL("expected ConfigParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigParseError);
    CHECK(std::string(e.what()).find("x.cfg:2") != std::string::npos);
    CHECK(std::string(e.what()).find("masss") != std::string::npos);
  }
  CHECK(parse_code("mass = heavy\n[channel]\ncoupling = 1\n") == ErrorCode::ConfigParseError);
  CHECK(parse_code("[bogus]\n") == ErrorCode::ConfigParseError);
  CHECK(parse_code("[channel]\nwidth = 0.1\nshape = sqrt\n") == ErrorCode::ConfigParseError);
  CHECK(parse_code("[channel]\nthreshold = 0.1\n") == ErrorCode::ConfigParseError);
  CHECK(parse_code("n_t = 1\n[channel]\ncoupling = 1\n") == ErrorCode::ConfigParseError);
  CHECK(parse_code("run = paper-example\n[channel]\ncoupling = 1\n") == ErrorCode::ConfigParseError);
}

TEST_CASE("width keys and the qft flag") {
  std::istringstream in("[channel]\nwidth = 0.09\nshape = constant\n[channel]\ncoupling = 0.5\n");
  auto cfg = parse_config(in);
  CHECK(cfg.system.channels[0].coupling == doctest::Approx(0.3));
  apply_qft_flag(cfg);
  CHECK(cfg.system.formulation == Formulation::QFT);
  CHECK(cfg.system.channels[0].shape == WidthShape::BreitWignerConstant);
  CHECK(cfg.system.channels[1].shape == WidthShape::SillRelativistic);
  std::istringstream in2("formulation = qm\n[channel]\ncoupling = 0.5\n");
  auto fixed = parse_config(in2);
  apply_qft_flag(fixed);
  CHECK(fixed.system.formulation == Formulation::QM);
}

TEST_CASE("help lists run kinds and exit codes") {
  std::string out;
  CHECK(run_cli("--help", &out) == 0);
  for (const char* k : {"spectral", "trajectory", "oracle", "paper-example", "Exit codes"})
    CHECK(out.find(k) != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_cli("--config /nonexistent/file.cfg") == exit_code(ErrorCode::IoError));
  CHECK(run_cli("--config '" + write_config("bad.cfg", "run = trajectory\n") + "'") ==
        exit_code(ErrorCode::ConfigParseError));
  const std::string stable = write_config("stable.cfg", "[channel]\ncoupling = 0\nthreshold = 0.1\n");
  CHECK(run_cli("--config '" + stable + "' --out '" + (scratch() / "st").string() + "'") ==
        exit_code(ErrorCode::StableStateUnsupported));
  CHECK(run_cli("--config '" + write_config("small0.cfg", kSmall) + "' --run oracle") ==
        exit_code(ErrorCode::InvalidArgument));
  CHECK(run_cli("") == exit_code(ErrorCode::InvalidArgument));
}

TEST_CASE("trajectory output is deterministic and unitary") {
  const std::string cfg = write_config("small.cfg", kSmall);
  const std::string a = (scratch() / "a").string(), b = (scratch() / "b").string();
  REQUIRE(run_cli("--config '" + cfg + "' --out '" + a + "'") == 0);
  REQUIRE(run_cli("--config '" + cfg + "' --out '" + b + "' --threads 2") == 0);
  CHECK(slurp(a + "_trajectory.csv") == slurp(b + "_trajectory.csv"));
  const auto t = read_csv(a + "_trajectory.csv");
  const std::vector<std::string> cols{"t",  "p",  "w1", "w2",         "h",          "h1",
                                      "h2", "w1_over_w2", "h1_over_h2", "bw_w1", "bw_w2"};
  CHECK(t.columns == cols);
  REQUIRE(t.comments.size() == 1);
  CHECK(t.comments[0].find("tolerance") != std::string::npos);
  CHECK(t.rows.size() == 13);
  for (const auto& r : t.rows) CHECK(std::abs(r[1] + r[2] + r[3] - 1) <= 2e-3);
}

TEST_CASE("qft flag switches the formulation") {
  const std::string cfg = write_config("small2.cfg", kSmall);
  const std::string q = (scratch() / "q").string();
  REQUIRE(run_cli("--config '" + cfg + "' --out '" + q + "' --qft") == 0);
  const auto t = read_csv(q + "_trajectory.csv");
  CHECK(t.comments[0].find("formulation=qft") != std::string::npos);
}

TEST_CASE("spectral scan") {
  const std::string cfg = write_config(
      "spec.cfg", std::string("run = spectral\nn_e = 200\nnodes = 2000\n") + kChannels);
  const std::string s = (scratch() / "s").string();
  std::string out;
  REQUIRE(run_cli("--config '" + cfg + "' --out '" + s + "'", &out) == 0);
  CHECK(out.find("r1=0.790332") != std::string::npos);
  const auto t = read_csv(s + "_spectral.csv");
  CHECK(t.rows.size() == 200);
  CHECK(t.column("d_S2") == 3);
  for (const auto& r : t.rows) CHECK(r[1] == doctest::Approx(r[2] + r[3]).epsilon(1e-14));
}

TEST_CASE("paper-example preset") {
  const std::string cfg = write_config("pe.cfg", "run = paper-example\nt_max = 50\nn_t = 26\nnodes = 4000\n");
  const std::string pe = (scratch() / "pe").string();
  std::string out;
  REQUIRE(run_cli("--config '" + cfg + "' --out '" + pe + "'", &out) == 0);
  CHECK(out.find("r1=0.790 r2=0.210 Gamma1/Gamma=0.788 Gamma2/Gamma=0.212 Gamma1/Gamma2=3.727") !=
        std::string::npos);
  for (const char* f : {"_fig1.csv", "_fig2.csv", "_fig3.csv", "_fig4.csv", "_summary.txt", "_trajectory.csv"})
    CHECK(fs::exists(pe + f));
  CHECK(read_csv(pe + "_fig2.csv").columns == std::vector<std::string>{"t", "w1_over_w2", "gamma1_over_gamma2"});
  CHECK(read_csv(pe + "_fig3.csv").columns == std::vector<std::string>{"t", "h", "h1", "h2"});
}

TEST_CASE("oracle comparison") {
  const std::string cfg = write_config(
      "orc.cfg", std::string("run = oracle\nt_max = 10\nn_t = 3\noracle_bins = 2000\nnodes = 6000\n") +
                     kChannels);
  const std::string o = (scratch() / "o").string();
  std::string out;
  REQUIRE(run_cli("--config '" + cfg + "' --out '" + o + "'", &out) == 0);
  const auto t = read_csv(o + "_oracle.csv");
  for (const auto& r : t.rows) CHECK(std::abs(r[t.column("dp")]) < 1e-3);
  CHECK(out.find("doubling gate passed") != std::string::npos);
}

}
