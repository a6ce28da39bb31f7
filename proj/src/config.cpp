#include "mdecay/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "mdecay/error.hpp"
#include "mdecay/qft.hpp"

namespace mdecay {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Parser {
  std::string source;
  std::size_t line = 0;
  std::string key;

  [[noreturn]] void fail(const std::string& msg) const {
    std::string where = source + ":" + std::to_string(line);
    if (!key.empty()) where += ": " + key;
    throw Error(ErrorCode::ConfigParseError, where + ": " + msg);
  }

  double number(const std::string& v) const {
    std::size_t pos = 0;
    double x;
    try {
      x = std::stod(v, &pos);
    } catch (const std::exception&) {
      fail("expected a number, got '" + v + "'");
    }
    if (pos != v.size() || !std::isfinite(x)) fail("expected a number, got '" + v + "'");
    return x;
  }

  std::size_t count(const std::string& v) const {
    const double x = number(v);
    if (x < 0 || x != std::floor(x) || x > 1e9) fail("expected a nonnegative integer, got '" + v + "'");
    return static_cast<std::size_t>(x);
  }
};

struct PendingChannel {
  std::optional<double> coupling, width, threshold;
  std::optional<WidthShape> shape;
  std::size_t line = 0;
};

}  // namespace

std::optional<RunKind> parse_run_kind(const std::string& s) {
  const std::string v = lower(s);
  if (v == "spectral") return RunKind::Spectral;
  if (v == "trajectory") return RunKind::Trajectory;
  if (v == "oracle") return RunKind::Oracle;
  if (v == "paper-example") return RunKind::PaperExample;
  return std::nullopt;
}

const char* run_kind_name(RunKind k) {
  switch (k) {
    case RunKind::Spectral: return "spectral";
    case RunKind::Trajectory: return "trajectory";
    case RunKind::Oracle: return "oracle";
    case RunKind::PaperExample: return "paper-example";
  }
  return "?";
}

RunConfig paper_example_config() {
  RunConfig c;
  c.run = RunKind::PaperExample;
  c.system = paper_example();
  return c;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  cfg.system.channels.clear();
  Parser p{source, 0, {}};
  std::vector<PendingChannel> chans;
  bool in_channel = false;
  std::string raw;

  std::map<std::string, std::function<void(const std::string&)>> top = {
      {"run",
       [&](const std::string& v) {
         auto k = parse_run_kind(v);
         if (!k) p.fail("unknown run kind '" + v + "'");
         cfg.run = *k;
       }},
      {"formulation",
       [&](const std::string& v) {
         const std::string f = lower(v);
         if (f == "qm") cfg.system.formulation = Formulation::QM;
         else if (f == "qft") cfg.system.formulation = Formulation::QFT;
         else p.fail("formulation must be qm or qft");
         cfg.formulation_given = true;
       }},
      {"mass", [&](const std::string& v) { cfg.system.mass = p.number(v); }},
      {"form_factor_scale", [&](const std::string& v) { cfg.system.form_factor_scale = p.number(v); }},
      {"t_max", [&](const std::string& v) { cfg.t_max = p.number(v); }},
      {"n_t", [&](const std::string& v) { cfg.n_t = p.count(v); }},
      {"e_max", [&](const std::string& v) { cfg.e_max = p.number(v); }},
      {"n_e", [&](const std::string& v) { cfg.n_e = p.count(v); }},
      {"nodes", [&](const std::string& v) { cfg.nodes = p.count(v); }},
      {"oracle_bins", [&](const std::string& v) { cfg.oracle_bins = p.count(v); }},
      {"threads", [&](const std::string& v) { cfg.threads = static_cast<unsigned>(p.count(v)); }},
      {"output", [&](const std::string& v) { cfg.output = v; }},
      {"wi_formula",
       [&](const std::string& v) {
         const std::string f = lower(v);
         if (f == "spectral") cfg.wi_formula = WiFormula::Spectral;
         else if (f == "timedomain") cfg.wi_formula = WiFormula::TimeDomain;
         else if (f == "approx") cfg.wi_formula = WiFormula::Approx;
         else p.fail("wi_formula must be spectral, timedomain or approx");
       }},
  };
  std::map<std::string, std::function<void(PendingChannel&, const std::string&)>> chan = {
      {"coupling", [&](PendingChannel& c, const std::string& v) { c.coupling = p.number(v); }},
      {"width", [&](PendingChannel& c, const std::string& v) { c.width = p.number(v); }},
      {"threshold", [&](PendingChannel& c, const std::string& v) { c.threshold = p.number(v); }},
      {"shape",
       [&](PendingChannel& c, const std::string& v) {
         const std::string s = lower(v);
         if (s == "sqrt") c.shape = WidthShape::SqrtFormFactor;
         else if (s == "constant") c.shape = WidthShape::BreitWignerConstant;
         else if (s == "sill") c.shape = WidthShape::SillRelativistic;
         else p.fail("shape must be sqrt, constant or sill");
       }},
  };

  while (std::getline(in, raw)) {
    ++p.line;
    p.key.clear();
    const auto hash = raw.find('#');
    const std::string l = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (lower(l) != "[channel]") p.fail("unknown section " + l);
      chans.push_back({});
      chans.back().line = p.line;
      in_channel = true;
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) p.fail("expected key = value");
    p.key = lower(trim(l.substr(0, eq)));
    const std::string v = trim(l.substr(eq + 1));
    if (v.empty()) p.fail("missing value");
    if (in_channel) {
      auto it = chan.find(p.key);
      if (it == chan.end()) p.fail("unknown channel key");
      it->second(chans.back(), v);
    } else {
      auto it = top.find(p.key);
      if (it == top.end()) p.fail("unknown key");
      it->second(v);
    }
  }

  p.key.clear();
  if (cfg.n_t < 2 || !(cfg.t_max > 0)) p.fail("time grid must have n_t >= 2 and t_max > 0");
  if (!(cfg.e_max > 0) || cfg.n_e < 2 || cfg.nodes < 2)
    p.fail("energy grid must have e_max > 0, n_e >= 2 and nodes >= 2");
  if (cfg.run == RunKind::PaperExample) {
    if (!chans.empty()) p.fail("paper-example fixes the channels; remove the [channel] blocks");
    const auto keep = cfg;
    cfg = paper_example_config();
    cfg.formulation_given = keep.formulation_given;
    if (keep.system.formulation == Formulation::QFT) cfg.system = as_sill(cfg.system);
    cfg.t_max = keep.t_max;
    cfg.n_t = keep.n_t;
    cfg.e_max = keep.e_max;
    cfg.nodes = keep.nodes;
    cfg.n_e = keep.n_e;
    cfg.oracle_bins = keep.oracle_bins;
    cfg.wi_formula = keep.wi_formula;
    cfg.output = keep.output;
    cfg.threads = keep.threads;
    return cfg;
  }
  if (chans.empty()) p.fail("empty channel list: at least one [channel] block is required");
  for (const auto& c : chans) {
    p.line = c.line;
    ChannelSpec s;
    s.shape = c.shape.value_or(cfg.system.formulation == Formulation::QFT ? WidthShape::SillRelativistic
                                                                          : WidthShape::SqrtFormFactor);
    if (c.coupling && c.width) p.fail("give coupling or width, not both");
    if (c.width) {
      if (s.shape != WidthShape::BreitWignerConstant) p.fail("width applies to constant shapes only");
      if (*c.width < 0) p.fail("width must be >= 0");
      s.coupling = std::sqrt(*c.width);
    } else if (c.coupling) {
      s.coupling = *c.coupling;
    } else {
      p.fail("channel needs a coupling or width");
    }
    s.threshold = c.threshold.value_or(0.0);
    cfg.system.channels.push_back(s);
    cfg.shape_given.push_back(c.shape.has_value());
  }
  return cfg;
}

void apply_qft_flag(RunConfig& cfg) {
  if (cfg.formulation_given) return;
  cfg.system.formulation = Formulation::QFT;
  for (std::size_t i = 0; i < cfg.system.channels.size(); ++i)
    if (cfg.run == RunKind::PaperExample || i >= cfg.shape_given.size() || !cfg.shape_given[i])
      cfg.system.channels[i].shape = WidthShape::SillRelativistic;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  return parse_config(in, path);
}

}  // namespace mdecay
