#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ctrl_dos/controller.hpp"
#include "ctrl_dos/numerics.hpp"
#include "ctrl_dos/plant.hpp"

namespace ctrl_dos {

/// Crossing level for the phi-ODE. `Sigma` is the published stopping rule;
/// `ThresholdF` stops at the trigger ratio F(lambda) instead.
enum class TauStopLevel { Sigma, ThresholdF };

struct TauOptions {
  TauStopLevel stop = TauStopLevel::Sigma;
  double threshold_F = 0.0;  // required when stop == ThresholdF
  double horizon = 1.0;      // no crossing before this time -> NoCrossing
  bool keep_trace = false;
};

struct TauResult {
  double tau_lambda = 0.0;
  double level = 0.0;  // value phi reaches at tau_lambda
  double step = 0.0;   // RK4 step of the fine pass
  std::vector<std::pair<double, double>> phi_trace;
};

/// Right-hand side of the phi-ODE for closed-loop norm `acl_norm` and
/// sampled-term norm `bk_norm`.
inline double phi_rate(double phi, double acl_norm, double bk_norm) {
  return acl_norm + (acl_norm + bk_norm) * phi + bk_norm * phi * phi;
}

/// Minimal inter-event time: first tau with phi(tau) = level, phi(0) = 0.
TauResult compute_tau(const CanonicalSystem& sys, const GainLambda& g, double sigma,
                      const TauOptions& opts = {},
                      const NumericPolicy& policy = kDefaultPolicy);

/// Same integration from precomputed norms.
TauResult compute_tau_from_norms(double acl_norm, double bk_norm, double level,
                                 const TauOptions& opts = {},
                                 const NumericPolicy& policy = kDefaultPolicy);

enum class TriggerKind { Multiple, PeriodEnd };

struct TriggerEntry {
  double time = 0.0;
  TriggerKind kind = TriggerKind::Multiple;
  std::int64_t index = 0;  // l for multiples, n for period ends

  bool operator==(const TriggerEntry&) const = default;
};

/// Triggers of one jammer period n (1-based): multiples
/// `origin + l*tau` for l in [l_first, l_first + l_count), then `period_end`.
struct PeriodSchedule {
  std::size_t period = 0;
  std::int64_t l_first = 0;
  std::int64_t l_count = 0;
  double origin = 0.0;
  double period_end = 0.0;

  double multiple_time(std::int64_t l, double tau) const {
    return origin + static_cast<double>(l) * tau;
  }
};

/// Jammer-aware schedule. Stored run-length per period because a large
/// lambda yields billions of multiples per sleep window.
struct TriggerSchedule {
  double tau = 0.0;
  double period = 0.0;
  double off_cr = 0.0;
  bool resync_multiples = false;
  std::vector<PeriodSchedule> periods;

  std::int64_t size() const;
  /// Explicit trigger list; throws OutOfRange when size() > cap.
  std::vector<TriggerEntry> materialize(std::size_t cap = 10'000'000) const;
};

TriggerSchedule build_schedule(const TauResult& tau, const JammerProfile& j,
                               std::size_t n_periods, bool resync_multiples = false);

}  // namespace ctrl_dos
