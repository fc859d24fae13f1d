#include "ctrl_dos/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctrl_dos/error.hpp"

namespace ctrl_dos {

MuValue mu(const Matrix& m) {
  if (!m.square()) throw Error(ErrorCode::InvalidInput, "mu: matrix must be square");
  const Matrix sym = (m + m.transpose()) * 0.5;
  MuValue out;
  out.mu_raw = sym_eigvals(sym).back();
  out.mu_M = std::abs(out.mu_raw) + 1.0;
  return out;
}

double gram_lambda_min(const Matrix& t) {
  const double norm_t = spectral_norm(t);
  return 1.0 / (norm_t * norm_t);
}

DecayReport decay_coefficient(const CanonicalSystem& sys, const GainLambda& g,
                              const JordanData& jd, const TauResult& tau,
                              const JammerProfile& j, double sigma, const DecayOptions& opts) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw Error(ErrorCode::InvalidParameter, "sigma must lie in (0, 1)");
  DecayTerms t;
  t.norm_T_inv = spectral_norm(jd.T_inv);
  t.lambda_min_gram = gram_lambda_min(jd.T);
  t.norm_BK = spectral_norm(g.bk(sys.Bc));
  t.norm_N = spectral_norm(jd.N);
  t.mu_A = mu(sys.Ac).mu_M;
  const double margin = 2.0 * g.lambda - 1.0 - 2.0 * t.norm_N;
  if (!(margin > 0.0))
    throw Error(ErrorCode::InadmissibleLambda, "decay_coefficient: lambda not admissible");
  if (!(t.lambda_min_gram > 0.0))
    throw Error(ErrorCode::NumericalFailure,
                "decay_coefficient: Gram matrix of T^-1 is not positive definite");
  t.rate = (1.0 - sigma) * margin;

  const double off = j.off_cr(), on = j.on_cr();
  const double conditioning = t.norm_T_inv / std::sqrt(t.lambda_min_gram);
  const double growth = std::exp(on * t.mu_A);
  const double tau_factor = opts.c3_half_exponent ? 0.5 : 1.0;

  DecayReport r;
  r.lambda = g.lambda;
  r.tau_lambda = tau.tau_lambda;
  r.C1 = conditioning * std::exp(-t.rate * off / 4.0);
  r.C2 = t.norm_BK / t.mu_A * std::expm1(on * t.mu_A);
  r.C3 = conditioning * std::exp(-t.rate * tau_factor * tau.tau_lambda) * growth;
  r.C = r.C1 * (r.C2 + r.C3);
  r.terms = t;
  if (!std::isfinite(r.C))
    throw Error(ErrorCode::NumericalFailure, "decay_coefficient: C(lambda) is not finite");
  return r;
}

DecayReport analyze_lambda(const CanonicalSystem& sys, const JammerProfile& j, double sigma,
                           double lambda, const SweepOptions& opts) {
  const GainLambda g = synthesize_gain(sys.order(), lambda, sys.a);
  const Matrix acl = closed_loop(sys, g);
  const JordanData jd = jordan_chain(acl, lambda);
  TauOptions tau_opts;
  tau_opts.horizon = j.period();
  tau_opts.stop = opts.tau_stop;
  if (opts.tau_stop == TauStopLevel::ThresholdF)
    tau_opts.threshold_F = trigger_threshold(jd, g, sys.Bc, sigma).F;
  const TauResult tau = compute_tau(sys, g, sigma, tau_opts);
  return decay_coefficient(sys, g, jd, tau, j, sigma, opts.decay);
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0 && std::isfinite(step) && std::isfinite(start) && stop >= start))
    throw Error(ErrorCode::InvalidParameter, "grid needs step > 0 and stop >= start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  // Decimal steps such as 0.01: divide integers so 0.07 prints as 0.07.
  const double inv = std::round(1.0 / step);
  const double first = std::round(start * inv);
  const bool decimal = inv > 1.0 && std::abs(inv * step - 1.0) < 1e-12 &&
                       std::abs(start * inv - first) < 1e-9 * std::max(1.0, std::abs(first));
  for (std::size_t k = 0; k < count; ++k) {
    const double kd = static_cast<double>(k);
    grid[k] = decimal ? (first + kd) / inv : start + kd * step;
  }
  return grid;
}

void check_grid(const std::vector<double>& grid, std::size_t n) {
  if (grid.empty()) throw Error(ErrorCode::InvalidParameter, "empty lambda grid");
  const double bound = admissible_lambda_bound(n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > bound)) {
      std::ostringstream os;
      os << "grid lambda " << grid[k] << " is not admissible (need > " << bound << ")";
      throw Error(ErrorCode::InvalidParameter, os.str());
    }
    if (k > 0 && !(grid[k] > grid[k - 1]))
      throw Error(ErrorCode::InvalidParameter, "lambda grid must be strictly ascending");
  }
}

std::optional<double> find_lambda_bar(const std::vector<DecayReport>& reports) {
  std::optional<double> bar;
  for (std::size_t k = reports.size(); k-- > 0;) {
    if (!(reports[k].C < 1.0)) break;
    bar = reports[k].lambda;
  }
  return bar;
}

SweepResult sweep_serial(const CanonicalSystem& sys, const JammerProfile& j, double sigma,
                         const std::vector<double>& grid, const SweepOptions& opts) {
  check_grid(grid, sys.order());
  SweepResult out;
  out.reports.reserve(grid.size());
  for (double lambda : grid) out.reports.push_back(analyze_lambda(sys, j, sigma, lambda, opts));
  out.lambda_bar = find_lambda_bar(out.reports);
  return out;
}

double interpolate_lambda_for_C(const SweepResult& sweep, double target_C) {
  const auto& r = sweep.reports;
  if (r.empty()) throw Error(ErrorCode::OutOfRange, "empty sweep");
  std::size_t head = r.size() - 1;
  while (head > 0 && r[head - 1].C > r[head].C) --head;
  const double c_hi = r[head].C, c_lo = r.back().C;
  if (!(target_C <= c_hi && target_C >= c_lo)) {
    std::ostringstream os;
    os << "target C " << target_C << " outside the decreasing tail [" << c_lo << ", " << c_hi
       << "]";
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  for (std::size_t k = head; k < r.size(); ++k) {
    if (r[k].C == target_C) return r[k].lambda;
    if (k + 1 < r.size() && r[k + 1].C < target_C) {
      const double w = (r[k].C - target_C) / (r[k].C - r[k + 1].C);
      return r[k].lambda + w * (r[k + 1].lambda - r[k].lambda);
    }
  }
  return r.back().lambda;
}

}  // namespace ctrl_dos
