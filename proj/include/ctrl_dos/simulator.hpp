#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ctrl_dos/controller.hpp"
#include "ctrl_dos/numerics.hpp"
#include "ctrl_dos/plant.hpp"
#include "ctrl_dos/trigger.hpp"

namespace ctrl_dos {

/// Zero-order-hold propagator of x' = A x + B u with scalar u held constant.
/// Built from the exponential of the augmented matrix [[A, B], [0, 0]].
class ZohPropagator {
 public:
  ZohPropagator(const Matrix& a, const Matrix& b);

  struct Step {
    Matrix phi;    // expm(A h)
    Vector gamma;  // int_0^h expm(A s) ds B
  };

  Step step(double h) const;
  Vector advance(std::span<const double> x, double u, double h) const;

  /// One sampled-data period of length h under u = u_row x(t_k).
  Matrix sampled_map(double h, std::span<const double> u_row) const;

  std::size_t order() const noexcept { return a_.rows(); }

 private:
  Matrix a_;
  Matrix b_;
};

/// M^m by binary powering.
Matrix matrix_power(const Matrix& m, std::uint64_t power);

enum class SimMode { JammedSchedule, EventTriggered };

struct SimConfig {
  Vector x0;
  std::size_t periods = 5;
  double period = 1.0;  // jammer period; horizon of event runs is periods * period
  double output_dt = 1e-3;
  SimMode mode = SimMode::JammedSchedule;
  double lambda = 0.0;
  double sigma = 0.1;
  /// Jammed mode: explicit trigger samples and recorded event times beyond
  /// this count are folded into matrix powers. Event mode: stop after this
  /// many events.
  std::size_t max_events = 100'000;
};

struct Sample {
  double t = 0.0;
  Vector x;
  double u = 0.0;
  std::optional<JammerState> jammer;  // empty when no jammer is modelled
  bool triggered = false;
};

struct SimTrace {
  std::vector<Sample> samples;      // ascending t
  std::vector<double> period_norms;  // |x(nT)|, n = 0, 1, ...
  std::vector<double> event_times;  // possibly truncated, see event_count
  std::int64_t event_count = 0;     // includes the initial update at t = 0
  std::int64_t omitted_trigger_samples = 0;
  std::optional<double> diverged_at;
};

/// Jammer-aware schedule run in canonical coordinates.
SimTrace run_jammed(const CanonicalSystem& sys, const GainLambda& g,
                    const TriggerSchedule& schedule, const SimConfig& cfg,
                    const NumericPolicy& policy = kDefaultPolicy);

/// Pure event triggering on |e_lambda|^2 > F^2 |x_lambda|^2, no jammer.
SimTrace run_event_triggered(const CanonicalSystem& sys, const GainLambda& g,
                             const JordanData& jd, const TriggerThreshold& thr,
                             const SimConfig& cfg,
                             const NumericPolicy& policy = kDefaultPolicy);

struct DecayMetrics {
  std::vector<double> norms;   // |x(nT)|, n = 0..N
  std::vector<double> ratios;  // |x(nT)| / |x((n-1)T)|, n = 1..N
  double max_ratio = 0.0;
  bool all_below_one = false;
};

/// Reads |x(nT)| from the samples at period boundaries. Needs at least two
/// full periods (InvalidInput otherwise).
DecayMetrics decay_metrics(const SimTrace& trace, double period);

/// V = |T^-1 x|^2 at every triggered sample.
std::vector<double> lyapunov_at_events(const SimTrace& trace, const JordanData& jd);

}  // namespace ctrl_dos
