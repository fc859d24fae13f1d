// ctrl-dos: command-line front end for gain synthesis, C(lambda) sweeps,
// tau_lambda tables and closed-loop simulation.

#include <omp.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctrl_dos/analysis.hpp"
#include "ctrl_dos/config.hpp"
#include "ctrl_dos/error.hpp"
#include "ctrl_dos/simulator.hpp"

namespace fs = std::filesystem;
using namespace ctrl_dos;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNotControllable = 2, kNumerical = 3, kNoLambdaBar = 4 };

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config:
    case ErrorCode::InvalidInput:
    case ErrorCode::InvalidParameter:
    case ErrorCode::InadmissibleLambda:
    case ErrorCode::LambdaTooSmall:
    case ErrorCode::MonitorResolution:
      return kConfig;
    case ErrorCode::NotControllable:
      return kNotControllable;
    default:
      return kNumerical;
  }
}

/// Writes to <out>/<name> when an output directory is given, stdout otherwise.
class Sink {
 public:
  Sink(const std::optional<fs::path>& dir, const std::string& name) {
    if (!dir) return;
    fs::create_directories(*dir);
    path_ = *dir / name;
    file_ = std::make_unique<std::ofstream>(path_);
    if (!*file_) throw Error(ErrorCode::Config, "cannot write " + path_.string());
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  fs::path path_;
  std::unique_ptr<std::ofstream> file_;
};

struct Options {
  std::string config;
  int jobs = 0;
  std::optional<fs::path> out;
};

CanonicalSystem canonical_of(const RunConfig& cfg) {
  return to_canonical(LtiSystem(cfg.A, cfg.B));
}

const JammerProfile& need_jammer(const RunConfig& cfg) {
  if (!cfg.jammer) throw Error(ErrorCode::Config, "this command needs a 'jammer' block");
  return *cfg.jammer;
}

std::vector<double> grid_of(const RunConfig& cfg) {
  if (!cfg.sweep) throw Error(ErrorCode::Config, "this command needs a 'sweep' block");
  return make_grid(cfg.sweep->lambda_start, cfg.sweep->lambda_stop, cfg.sweep->lambda_step);
}

void print_matrix(std::ostream& os, const char* name, const Matrix& m) {
  os << name << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "," : "") << fmt(m(i, j));
    os << '\n';
  }
}

int cmd_canonical(const RunConfig& cfg, const Options& opt) {
  const CanonicalSystem c = canonical_of(cfg);
  Sink sink(opt.out, "canonical.txt");
  auto& os = sink.os();
  print_matrix(os, "Ac", c.Ac);
  print_matrix(os, "Bc", c.Bc);
  print_matrix(os, "P", c.P);
  os << "a\n";
  for (std::size_t i = 0; i < c.a.size(); ++i) os << (i ? "," : "") << fmt(c.a[i]);
  os << '\n';
  return kOk;
}

int cmd_analyze(const RunConfig& cfg, const Options& opt) {
  const CanonicalSystem c = canonical_of(cfg);
  SweepOptions so;
  so.decay.c3_half_exponent = cfg.c3_half_exponent;
  so.tau_stop = cfg.stop_level;
  const SweepResult r = sweep(c, need_jammer(cfg), cfg.sigma, grid_of(cfg), so);
  Sink sink(opt.out, "analyze.csv");
  auto& os = sink.os();
  os << "lambda,tau_lambda,C1,C2,C3,C\n";
  for (const auto& d : r.reports)
    os << fmt(d.lambda) << ',' << fmt(d.tau_lambda) << ',' << fmt(d.C1) << ',' << fmt(d.C2)
       << ',' << fmt(d.C3) << ',' << fmt(d.C) << '\n';
  os << "# lambda_bar=" << (r.lambda_bar ? fmt(*r.lambda_bar) : "none") << '\n';
  return r.lambda_bar ? kOk : kNoLambdaBar;
}

int cmd_tau(const RunConfig& cfg, const Options& opt) {
  const CanonicalSystem c = canonical_of(cfg);
  const std::vector<double> grid = grid_of(cfg);
  const double bound = admissible_lambda_bound(c.order());
  std::vector<std::string> cells(grid.size());
  std::vector<std::exception_ptr> failures(grid.size());
  const auto count = static_cast<long>(grid.size());

#pragma omp parallel for schedule(dynamic, 8)
  for (long k = 0; k < count; ++k) {
    const double lambda = grid[static_cast<std::size_t>(k)];
    if (!(lambda > bound)) {
      cells[static_cast<std::size_t>(k)] = "error:inadmissible";
      continue;
    }
    try {
      const GainLambda g = synthesize_gain(c.order(), lambda, c.a);
      TauOptions to;
      to.stop = cfg.stop_level;
      if (cfg.stop_level == TauStopLevel::ThresholdF) {
        const JordanData jd = jordan_chain(closed_loop(c, g), lambda);
        to.threshold_F = trigger_threshold(jd, g, c.Bc, cfg.sigma).F;
      }
      cells[static_cast<std::size_t>(k)] = fmt(compute_tau(c, g, cfg.sigma, to).tau_lambda);
    } catch (...) {
      failures[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  Sink sink(opt.out, "tau.csv");
  auto& os = sink.os();
  os << "lambda,tau_lambda\n";
  for (std::size_t k = 0; k < grid.size(); ++k) os << fmt(grid[k]) << ',' << cells[k] << '\n';
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, const Options& opt) {
  if (!cfg.sim) throw Error(ErrorCode::Config, "simulate needs a 'sim' block");
  const SimSpec& spec = *cfg.sim;
  const CanonicalSystem c = canonical_of(cfg);
  const std::size_t n = c.order();
  const GainLambda g = synthesize_gain(n, spec.lambda, c.a);

  SimConfig sc;
  sc.x0 = solve(c.P, spec.x0);
  sc.periods = spec.periods;
  sc.output_dt = spec.output_dt;
  sc.mode = spec.mode;
  sc.lambda = spec.lambda;
  sc.sigma = cfg.sigma;
  sc.max_events = spec.max_events;

  SimTrace trace;
  if (spec.mode == SimMode::JammedSchedule) {
    const JammerProfile& j = need_jammer(cfg);
    sc.period = j.period();
    TauOptions to;
    to.stop = cfg.stop_level;
    if (cfg.stop_level == TauStopLevel::ThresholdF) {
      const JordanData jd = jordan_chain(closed_loop(c, g), spec.lambda);
      to.threshold_F = trigger_threshold(jd, g, c.Bc, cfg.sigma).F;
    }
    const TauResult tau = compute_tau(c, g, cfg.sigma, to);
    const TriggerSchedule s = build_schedule(tau, j, spec.periods, cfg.resync_multiples);
    trace = run_jammed(c, g, s, sc);
  } else {
    sc.period = cfg.jammer ? cfg.jammer->period() : 1.0;
    const JordanData jd = jordan_chain(closed_loop(c, g), spec.lambda);
    const TriggerThreshold thr = trigger_threshold(jd, g, c.Bc, cfg.sigma);
    trace = run_event_triggered(c, g, jd, thr, sc);
  }

  {
    Sink sink(opt.out, "trace.csv");
    auto& os = sink.os();
    os << 't';
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
    os << ",u,jammer,trigger\n";
    for (const auto& s : trace.samples) {
      os << fmt(s.t);
      for (double v : s.x) os << ',' << fmt(v);
      os << ',' << fmt(s.u) << ',' << (s.jammer ? to_string(*s.jammer) : "none") << ','
         << (s.triggered ? 1 : 0) << '\n';
    }
    os << "# events=" << trace.event_count
       << " omitted_trigger_samples=" << trace.omitted_trigger_samples << '\n';
  }
  {
    Sink sink(opt.out, "metrics.csv");
    auto& os = sink.os();
    os << "n,norm_xnT,ratio\n";
    const auto& pn = trace.period_norms;
    for (std::size_t k = 0; k < pn.size(); ++k) {
      os << k << ',' << fmt(pn[k]) << ',';
      if (k > 0 && pn[k - 1] > 0.0) os << fmt(pn[k] / pn[k - 1]);
      os << '\n';
    }
    if (trace.diverged_at) os << "# diverged_at=" << fmt(*trace.diverged_at) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jamming-resilient state-feedback design and simulation"};
  app.require_subcommand(1);
  Options opt;
  std::string out;

  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--jobs", opt.jobs, "worker threads for sweeps (default: OpenMP default)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory (default: stdout)");
    return sub;
  };
  CLI::App* canonical = add("canonical", "print the controllable canonical form");
  CLI::App* analyze = add("analyze", "sweep C(lambda) and report lambda_bar");
  CLI::App* tau = add("tau", "tabulate the minimal inter-event time");
  CLI::App* simulate = add("simulate", "simulate the closed loop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  if (!out.empty()) opt.out = fs::path(out);
  if (opt.jobs > 0) omp_set_num_threads(opt.jobs);

  try {
    const RunConfig cfg = load_config(opt.config);
    if (*canonical) return cmd_canonical(cfg, opt);
    if (*analyze) return cmd_analyze(cfg, opt);
    if (*tau) return cmd_tau(cfg, opt);
    if (*simulate) return cmd_simulate(cfg, opt);
  } catch (const Error& e) {
    std::cerr << "ctrl-dos: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "ctrl-dos: " << e.what() << '\n';
    return kNumerical;
  }
  return kConfig;
}
