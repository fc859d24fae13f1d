#include "ctrl_dos/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctrl_dos/error.hpp"

namespace ctrl_dos {

namespace {

Error no_crossing(double level, double horizon) {
  std::ostringstream os;
  os << "phi does not reach " << level << " before horizon " << horizon;
  return Error(ErrorCode::NoCrossing, os.str());
}

}  // namespace

TauResult compute_tau_from_norms(double acl_norm, double bk_norm, double level,
                                 const TauOptions& opts, const NumericPolicy& policy) {
  if (!(level > 0.0 && std::isfinite(level)))
    throw Error(ErrorCode::InvalidParameter, "phi crossing level must be > 0");
  if (!(acl_norm > 0.0 && bk_norm >= 0.0))
    throw Error(ErrorCode::InvalidParameter, "phi-ODE norms must be positive");

  const VectorField field = [=](double, std::span<const double> y) {
    return Vector{phi_rate(y[0], acl_norm, bk_norm)};
  };
  auto advance = [&](double t, double phi, double h) {
    const Vector y{phi};
    return rk4_step(field, t, y, h)[0];
  };

  // Coarse pass: phi' <= rate(level) while phi <= level, so
  // level / rate(level) is a lower bound on the crossing time.
  const double h0 = level / phi_rate(level, acl_norm, bk_norm) / 10.0;
  double t = 0.0, phi = 0.0;
  while (phi < level) {
    phi = advance(t, phi, h0);
    t += h0;
    if (t > opts.horizon || !std::isfinite(phi)) throw no_crossing(level, opts.horizon);
  }
  const double tau_estimate = t;

  TauResult out;
  out.level = level;
  out.step = std::min(policy.tau_max_step, tau_estimate / policy.tau_steps_per_tau);
  const double h = out.step;

  t = 0.0;
  phi = 0.0;
  std::int64_t i = 0;
  if (opts.keep_trace) out.phi_trace.emplace_back(0.0, 0.0);
  for (;;) {
    const double next = advance(t, phi, h);
    if (!std::isfinite(next)) throw Error(ErrorCode::NumericalFailure, "phi-ODE blew up");
    if (next >= level) break;
    phi = next;
    ++i;
    t = static_cast<double>(i) * h;
    if (opts.keep_trace) out.phi_trace.emplace_back(t, phi);
    if (t > opts.horizon) throw no_crossing(level, opts.horizon);
  }

  // Bisect the length of the final partial step.
  const double tol = std::min(policy.tau_bisect_abs, policy.tau_bisect_rel * (t + h));
  double lo = 0.0, hi = h;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (advance(t, phi, mid) < level)
      lo = mid;
    else
      hi = mid;
  }
  out.tau_lambda = t + 0.5 * (lo + hi);
  if (out.tau_lambda > opts.horizon) throw no_crossing(level, opts.horizon);
  if (opts.keep_trace) out.phi_trace.emplace_back(out.tau_lambda, level);
  return out;
}

TauResult compute_tau(const CanonicalSystem& sys, const GainLambda& g, double sigma,
                      const TauOptions& opts, const NumericPolicy& policy) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw Error(ErrorCode::InvalidParameter, "sigma must lie in (0, 1)");
  const std::size_t n = sys.order();
  if (!(g.lambda > admissible_lambda_bound(n))) {
    std::ostringstream os;
    os << "lambda " << g.lambda << " is not admissible (need > "
       << admissible_lambda_bound(n) << ")";
    throw Error(ErrorCode::InadmissibleLambda, os.str());
  }
  const double acl_norm = spectral_norm(closed_loop(sys, g));
  const double bk_norm = spectral_norm(g.bk(sys.Bc));
  double level = sigma;
  if (opts.stop == TauStopLevel::ThresholdF) {
    if (!(opts.threshold_F > 0.0))
      throw Error(ErrorCode::InvalidParameter, "ThresholdF stop level needs F > 0");
    level = opts.threshold_F;
  }
  return compute_tau_from_norms(acl_norm, bk_norm, level, opts, policy);
}

// ------------------------------------------------------------ schedule

std::int64_t TriggerSchedule::size() const {
  std::int64_t total = 0;
  for (const auto& p : periods) total += p.l_count + 1;
  return total;
}

std::vector<TriggerEntry> TriggerSchedule::materialize(std::size_t cap) const {
  const std::int64_t total = size();
  if (total < 0 || static_cast<std::uint64_t>(total) > cap) {
    std::ostringstream os;
    os << "schedule has " << total << " entries, more than the cap " << cap;
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  std::vector<TriggerEntry> out;
  out.reserve(static_cast<std::size_t>(total));
  for (const auto& p : periods) {
    for (std::int64_t k = 0; k < p.l_count; ++k) {
      const std::int64_t l = p.l_first + k;
      out.push_back({p.multiple_time(l, tau), TriggerKind::Multiple, l});
    }
    out.push_back({p.period_end, TriggerKind::PeriodEnd, static_cast<std::int64_t>(p.period)});
  }
  return out;
}

TriggerSchedule build_schedule(const TauResult& tau, const JammerProfile& j,
                               std::size_t n_periods, bool resync_multiples) {
  const double tl = tau.tau_lambda;
  if (!(tl > 0.0 && std::isfinite(tl)))
    throw Error(ErrorCode::InvalidParameter, "tau_lambda must be > 0");
  if (n_periods < 1) throw Error(ErrorCode::InvalidParameter, "need at least one period");
  const double T = j.period(), off = j.off_cr();
  if (tl > off * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "tau_lambda " << tl << " exceeds T_off_cr " << off
       << ": no trigger fits the sleep window, increase lambda";
    throw Error(ErrorCode::LambdaTooSmall, os.str());
  }

  TriggerSchedule s;
  s.tau = tl;
  s.period = T;
  s.off_cr = off;
  s.resync_multiples = resync_multiples;
  s.periods.reserve(n_periods);

  for (std::size_t n = 1; n <= n_periods; ++n) {
    const double start = static_cast<double>(n - 1) * T;
    PeriodSchedule p;
    p.period = n;
    p.period_end = static_cast<double>(n) * T;
    p.origin = resync_multiples ? start : 0.0;
    auto at = [&](std::int64_t l) { return p.multiple_time(l, tl); };
    auto sleeping = [&](std::int64_t l) {
      const double t = at(l);
      return t < p.period_end && jammer_state(j, t) == JammerState::Sleeping;
    };
    // First multiple strictly after the period start; a multiple landing on
    // (n-1)T coincides with the previous period end, which already triggers.
    std::int64_t first = static_cast<std::int64_t>(std::floor((start - p.origin) / tl)) + 1;
    while (first > 1 && at(first - 1) > start) --first;
    while (at(first) <= start) ++first;
    first = std::max<std::int64_t>(first, 1);
    std::int64_t last = std::max(
        first - 1, static_cast<std::int64_t>(std::floor((start + off - p.origin) / tl)));
    while (last >= first && !sleeping(last)) --last;
    while (sleeping(last + 1)) ++last;
    p.l_first = first;
    p.l_count = std::max<std::int64_t>(0, last - first + 1);
    s.periods.push_back(p);
  }
  return s;
}

}  // namespace ctrl_dos
