#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ctrl_dos/controller.hpp"
#include "ctrl_dos/numerics.hpp"
#include "ctrl_dos/plant.hpp"
#include "ctrl_dos/trigger.hpp"

namespace ctrl_dos {

/// mu_raw = max eig((M + M^T)/2); mu_M = |mu_raw| + 1 bounds |expm(M)| <= exp(mu_M).
struct MuValue {
  double mu_raw = 0.0;
  double mu_M = 1.0;
};

MuValue mu(const Matrix& m);

struct DecayOptions {
  /// Use tau_lambda/2 in the C3 exponent (the intermediate inequality of the
  /// derivation) instead of tau_lambda (the final displayed coefficient).
  bool c3_half_exponent = false;
};

/// Ingredients of the per-period coefficient, kept for cross-checking.
struct DecayTerms {
  double norm_T_inv = 0.0;
  double lambda_min_gram = 0.0;  // lambda_min((T^-1)^T T^-1)
  double norm_BK = 0.0;
  double norm_N = 0.0;
  double mu_A = 0.0;
  double rate = 0.0;  // (1 - sigma)(2 lambda - 1 - 2|N|)
};

struct DecayReport {
  double lambda = 0.0;
  double tau_lambda = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double C = 0.0;  // C1 (C2 + C3)
  DecayTerms terms;
};

/// lambda_min((T^-1)^T T^-1), evaluated as 1 / |T|^2. Forming the Gram
/// matrix squares the condition number of T and loses the small eigenvalue.
double gram_lambda_min(const Matrix& t);

DecayReport decay_coefficient(const CanonicalSystem& sys, const GainLambda& g,
                              const JordanData& jd, const TauResult& tau,
                              const JammerProfile& j, double sigma,
                              const DecayOptions& opts = {});

struct SweepOptions {
  DecayOptions decay;
  TauStopLevel tau_stop = TauStopLevel::Sigma;
};

/// Full per-lambda pipeline: gain, Jordan chain, tau_lambda, C(lambda).
DecayReport analyze_lambda(const CanonicalSystem& sys, const JammerProfile& j, double sigma,
                           double lambda, const SweepOptions& opts = {});

struct SweepResult {
  std::vector<DecayReport> reports;  // ascending lambda
  std::optional<double> lambda_bar;
};

/// Inclusive grid start, start + step, ... <= stop.
std::vector<double> make_grid(double start, double stop, double step);

/// Smallest grid lambda from which every later C is < 1.
std::optional<double> find_lambda_bar(const std::vector<DecayReport>& reports);

/// Reference implementation, one lambda after another.
SweepResult sweep_serial(const CanonicalSystem& sys, const JammerProfile& j, double sigma,
                         const std::vector<double>& grid, const SweepOptions& opts = {});

/// OpenMP across grid points; identical output to sweep_serial. On failure the
/// error of the lowest failing grid index is rethrown.
SweepResult sweep(const CanonicalSystem& sys, const JammerProfile& j, double sigma,
                  const std::vector<double>& grid, const SweepOptions& opts = {});

/// Piecewise-linear inverse of C on the strictly decreasing tail of a sweep.
double interpolate_lambda_for_C(const SweepResult& sweep, double target_C);

/// Validates an ascending admissible grid (InvalidParameter otherwise).
void check_grid(const std::vector<double>& grid, std::size_t n);

}  // namespace ctrl_dos
