#include "mdecay/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

#include "mdecay/csv.hpp"
#include "mdecay/error.hpp"
#include "mdecay/lee_oracle.hpp"

namespace mdecay {
namespace {

const char* formula_name(WiFormula f) {
  switch (f) {
    case WiFormula::Spectral: return "spectral";
    case WiFormula::TimeDomain: return "timedomain";
    case WiFormula::Approx: return "approx";
  }
  return "?";
}

std::string idx(const char* stem, std::size_t i, const char* tail = "") {
  return stem + std::to_string(i + 1) + tail;
}

struct Context {
  std::shared_ptr<const ChannelModel> model;
  SpectralTable table;
};

Context prepare(const RunConfig& cfg) {
  Context c;
  c.model = std::make_shared<const ChannelModel>(cfg.system);
  c.table = build_spectral_table(c.model, cfg.e_max, cfg.nodes);
  return c;
}

std::string units(const RunConfig& cfg) {
  const bool qft = cfg.system.formulation == Formulation::QFT;
  return std::string("units hbar=c=1; E in M; t in 1/M; h in M; formulation=") + (qft ? "qft" : "qm");
}

DecayTrajectory trajectory(const RunConfig& cfg, const Context& c) {
  return compute_trajectory(c.table, uniform_grid(cfg.t_max, cfg.n_t), cfg.wi_formula, cfg.threads);
}

std::string write_trajectory(const RunConfig& cfg, const DecayTrajectory& tr) {
  const std::size_t nc = tr.w.size(), nt = tr.times.size();
  std::vector<std::string> cols{"t", "p"};
  for (std::size_t i = 0; i < nc; ++i) cols.push_back(idx("w", i));
  cols.push_back("h");
  for (std::size_t i = 0; i < nc; ++i) cols.push_back(idx("h", i));
  cols.push_back("w1_over_w2");
  cols.push_back("h1_over_h2");
  for (std::size_t i = 0; i < nc; ++i) cols.push_back(idx("bw_w", i));
  char tol[64];
  std::snprintf(tol, sizeof tol, "; tolerance |p+sum w-1| <= %g", kUnitarityTolerance);
  const std::string path = cfg.output + "_trajectory.csv";
  CsvWriter out(path, units(cfg) + "; wi_formula=" + formula_name(tr.formula) + tol, cols);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool have_h = tr.h.size() == nt;
  for (std::size_t k = 0; k < nt; ++k) {
    std::vector<double> r{tr.times[k], tr.p[k]};
    for (std::size_t i = 0; i < nc; ++i) r.push_back(tr.w[i][k]);
    r.push_back(have_h ? tr.h[k] : nan);
    for (std::size_t i = 0; i < nc; ++i) r.push_back(have_h ? tr.h_partial[i][k] : nan);
    r.push_back(tr.w_ratio[k]);
    r.push_back(have_h && !tr.h_ratio.empty() ? tr.h_ratio[k] : nan);
    for (std::size_t i = 0; i < nc; ++i) r.push_back(tr.bw_w[i][k]);
    out.row(r);
  }
  out.close();
  return path;
}

RunResult run_spectral(const RunConfig& cfg, std::ostream& log) {
  const Context c = prepare(cfg);
  const ChannelModel& m = *c.model;
  const std::size_t nc = m.channels();
  std::vector<std::string> cols{"E", "d_S"};
  for (std::size_t i = 0; i < nc; ++i) cols.push_back(idx("d_S", i));
  cols.push_back("re_pi");
  cols.push_back("im_pi");
  RunResult res;
  const std::string path = cfg.output + "_spectral.csv";
  CsvWriter out(path, units(cfg), cols);
  const double lo = m.breit_wigner() ? m.spec().mass - cfg.e_max : m.support_start();
  const double hi = m.breit_wigner() ? m.spec().mass + cfg.e_max : cfg.e_max;
  for (std::size_t k = 0; k < cfg.n_e; ++k) {
    const double e = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cfg.n_e - 1);
    const SpectralValue v = m.spectral(e);
    std::vector<double> r{e, v.total};
    for (double x : v.partial) r.push_back(x);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      re += m.re_pi(i, e);
      im += m.im_pi(i, e);
    }
    r.push_back(re);
    r.push_back(im);
    out.row(r);
  }
  out.close();
  res.files.push_back(path);
  char buf[256];
  std::snprintf(buf, sizeof buf, "normalization defect %.3e", c.table.norm_defect);
  res.summary = buf;
  for (std::size_t i = 0; i < nc; ++i) {
    std::snprintf(buf, sizeof buf, " r%zu=%.6f", i + 1, c.table.branching_ratio(i));
    res.summary += buf;
  }
  log << res.summary << "\n";
  return res;
}

RunResult run_trajectory(const RunConfig& cfg, std::ostream& log) {
  const Context c = prepare(cfg);
  const DecayTrajectory tr = trajectory(cfg, c);
  RunResult res;
  res.files.push_back(write_trajectory(cfg, tr));
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    double s = tr.p[k] - 1.0;
    for (const auto& w : tr.w) s += w[k];
    worst = std::max(worst, std::abs(s));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |p+sum w-1| = %.3e over %zu times", worst, tr.times.size());
  res.summary = buf;
  log << res.summary << "\n";
  return res;
}

RunResult run_oracle(const RunConfig& cfg, std::ostream& log) {
  const Context c = prepare(cfg);
  const auto times = uniform_grid(cfg.t_max, cfg.n_t);
  const OracleFixture fx = make_fixture(cfg.system, cfg.oracle_bins, cfg.e_max, times);
  const std::size_t nc = c.model->channels();
  std::vector<std::string> cols{"t", "p", "p_oracle", "dp"};
  for (std::size_t i = 0; i < nc; ++i) {
    cols.push_back(idx("w", i));
    cols.push_back(idx("w", i, "_oracle"));
    cols.push_back(idx("dw", i));
  }
  char head[256];
  std::snprintf(head, sizeof head,
                "; oracle bins=%zu dimension=%zu window=%g dp_bins=%.3e dp_emax=%.3e gate=%s",
                fx.bins, fx.dimension, fx.window, fx.dp_bins, fx.dp_emax,
                fx.gate_passed ? "pass" : "fail");
  const std::string path = cfg.output + "_oracle.csv";
  CsvWriter out(path, units(cfg) + head, cols);
  double dp = 0.0, dw = 0.0;
  for (const auto& row : fx.rows) {
    const double p = survival_probability(c.table, row.t);
    const auto w = channel_probabilities_spectral(c.table, row.t);
    std::vector<double> r{row.t, p, row.p, p - row.p};
    dp = std::max(dp, std::abs(p - row.p));
    for (std::size_t i = 0; i < nc; ++i) {
      r.push_back(w[i]);
      r.push_back(row.w[i]);
      r.push_back(w[i] - row.w[i]);
      dw = std::max(dw, std::abs(w[i] - row.w[i]));
    }
    out.row(r);
  }
  out.close();
  RunResult res;
  res.files.push_back(path);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |dp| = %.3e, max |dw| = %.3e, doubling gate %s", dp, dw,
                fx.gate_passed ? "passed" : "FAILED");
  res.summary = buf;
  log << res.summary << "\n";
  if (!fx.gate_passed)
    throw Error(ErrorCode::ConvergenceGateFailed,
                "oracle grid not converged under doubling (see " + path + ")");
  return res;
}

RunResult run_paper(const RunConfig& cfg, std::ostream& log) {
  const Context c = prepare(cfg);
  const DecayTrajectory tr = trajectory(cfg, c);
  const PaperSummary s = paper_summary(c.table);
  RunResult res;
  res.files.push_back(write_trajectory(cfg, tr));
  const std::string u = units(cfg);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool have_h = tr.h.size() == tr.times.size();
  {
    CsvWriter f(cfg.output + "_fig1.csv", u + "; survival and decay probabilities",
                {"t", "p", "w1", "w2"});
    for (std::size_t k = 0; k < tr.times.size(); ++k) f.row({tr.times[k], tr.p[k], tr.w[0][k], tr.w[1][k]});
    f.close();
    res.files.push_back(f.path());
  }
  {
    CsvWriter f(cfg.output + "_fig2.csv", u + "; ratio w1/w2 and the constant Gamma1/Gamma2",
                {"t", "w1_over_w2", "gamma1_over_gamma2"});
    for (std::size_t k = 0; k < tr.times.size(); ++k) f.row({tr.times[k], tr.w_ratio[k], s.gamma_ratio});
    f.close();
    res.files.push_back(f.path());
  }
  {
    CsvWriter f(cfg.output + "_fig3.csv", u + "; h = -dp/dt and h_i = dw_i/dt", {"t", "h", "h1", "h2"});
    for (std::size_t k = 0; k < tr.times.size(); ++k)
      f.row({tr.times[k], have_h ? tr.h[k] : nan, have_h ? tr.h_partial[0][k] : nan,
             have_h ? tr.h_partial[1][k] : nan});
    f.close();
    res.files.push_back(f.path());
  }
  {
    CsvWriter f(cfg.output + "_fig4.csv", u + "; ratio h1/h2 and the constant Gamma1/Gamma2",
                {"t", "h1_over_h2", "gamma1_over_gamma2"});
    for (std::size_t k = 0; k < tr.times.size(); ++k)
      f.row({tr.times[k], have_h ? tr.h_ratio[k] : nan, s.gamma_ratio});
    f.close();
    res.files.push_back(f.path());
  }
  res.summary = format_summary(s);
  const std::string sp = cfg.output + "_summary.txt";
  std::ofstream sf(sp);
  if (!sf) throw Error(ErrorCode::IoError, "cannot write " + sp);
  sf << res.summary << "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "r1=%.17g r2=%.17g gamma1=%.17g gamma2=%.17g norm_defect=%.3e\n",
                s.r[0], s.r[1], c.model->on_shell_width(0), c.model->on_shell_width(1),
                c.table.norm_defect);
  sf << buf;
  res.files.push_back(sp);
  log << res.summary << "\n";
  return res;
}

}  // namespace

PaperSummary paper_summary(const SpectralTable& table) {
  const std::size_t nc = table.channels();
  if (nc < 2) throw Error(ErrorCode::InvalidArgument, "summary needs two channels");
  PaperSummary s;
  double g = 0.0;
  std::vector<double> gi(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    s.r.push_back(table.branching_ratio(i));
    gi[i] = table.model->on_shell_width(i);
    g += gi[i];
  }
  for (double x : gi) s.gamma_frac.push_back(x / g);
  s.gamma_ratio = gi[0] / gi[1];
  s.r_ratio = s.r[0] / s.r[1];
  return s;
}

std::string format_summary(const PaperSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "r1=%.3f r2=%.3f Gamma1/Gamma=%.3f Gamma2/Gamma=%.3f Gamma1/Gamma2=%.3f r1/r2=%.3f",
                s.r[0], s.r[1], s.gamma_frac[0], s.gamma_frac[1], s.gamma_ratio, s.r_ratio);
  return buf;
}

RunResult run(const RunConfig& cfg, std::ostream& log) {
  switch (cfg.run) {
    case RunKind::Spectral: return run_spectral(cfg, log);
    case RunKind::Trajectory: return run_trajectory(cfg, log);
    case RunKind::Oracle: return run_oracle(cfg, log);
    case RunKind::PaperExample: return run_paper(cfg, log);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown run kind");
}

}  // namespace mdecay
