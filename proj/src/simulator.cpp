#include "ctrl_dos/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "ctrl_dos/error.hpp"

namespace ctrl_dos {

ZohPropagator::ZohPropagator(const Matrix& a, const Matrix& b) : a_(a), b_(b) {
  if (!a.square() || b.rows() != a.rows() || b.cols() != 1)
    throw Error(ErrorCode::InvalidInput, "ZohPropagator: need n x n A and n x 1 B");
}

ZohPropagator::Step ZohPropagator::step(double h) const {
  const std::size_t n = order();
  Matrix aug(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a_(i, j) * h;
    aug(i, n) = b_(i, 0) * h;
  }
  const Matrix e = expm(aug);
  Step s{Matrix(n, n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s.phi(i, j) = e(i, j);
    s.gamma[i] = e(i, n);
  }
  return s;
}

Vector ZohPropagator::advance(std::span<const double> x, double u, double h) const {
  const Step s = step(h);
  return axpy(u, s.gamma, s.phi * x);
}

Matrix ZohPropagator::sampled_map(double h, std::span<const double> u_row) const {
  const Step s = step(h);
  return s.phi + Matrix::column(s.gamma) * Matrix::row(u_row);
}

Matrix matrix_power(const Matrix& m, std::uint64_t power) {
  if (!m.square()) throw Error(ErrorCode::InvalidInput, "matrix_power: matrix must be square");
  Matrix result = Matrix::identity(m.rows());
  Matrix base = m;
  while (power > 0) {
    if (power & 1U) result = result * base;
    power >>= 1U;
    if (power > 0) base = base * base;
  }
  return result;
}

namespace {

double time_tol(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

void validate(const SimConfig& cfg, std::size_t n) {
  if (cfg.x0.size() != n) {
    std::ostringstream os;
    os << "x0 has " << cfg.x0.size() << " entries, system order is " << n;
    throw Error(ErrorCode::InvalidInput, os.str());
  }
  for (double v : cfg.x0)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "x0 must be finite");
  if (!(cfg.output_dt > 0.0 && std::isfinite(cfg.output_dt)))
    throw Error(ErrorCode::InvalidInput, "output_dt must be > 0");
  if (!(cfg.period > 0.0)) throw Error(ErrorCode::InvalidInput, "period must be > 0");
  if (cfg.periods < 1) throw Error(ErrorCode::InvalidInput, "need at least one period");
}

/// Shared bookkeeping: last update (t_k, z_k, u_k), the output lattice and
/// the period boundaries.
class Runner {
 public:
  Runner(const ZohPropagator& prop, Vector u_row, const SimConfig& cfg, double period,
         std::size_t periods, std::optional<JammerProfile> jammer, std::size_t event_cap,
         double divergence_norm)
      : prop_(prop),
        u_row_(std::move(u_row)),
        dt_(cfg.output_dt),
        period_(period),
        periods_(periods),
        horizon_(static_cast<double>(periods) * period),
        jammer_(jammer),
        event_cap_(event_cap),
        divergence_norm_(divergence_norm) {
    t_k_ = 0.0;
    z_k_ = cfg.x0;
    u_k_ = dot(u_row_, z_k_);
    trace_.event_count = 1;
    trace_.event_times.push_back(0.0);
    trace_.period_norms.push_back(norm2(z_k_));
    push(0.0, z_k_, true);
    next_j_ = 1;
  }

  double t_k() const { return t_k_; }
  const Vector& z_k() const { return z_k_; }
  double u_k() const { return u_k_; }
  double horizon() const { return horizon_; }
  std::int64_t event_count() const { return trace_.event_count; }

  /// Next output lattice time, +inf past the horizon.
  double next_sample_time() const {
    const double s = static_cast<double>(next_j_) * dt_;
    return s <= horizon_ + time_tol(horizon_) ? s : std::numeric_limits<double>::infinity();
  }

  Vector state_at(double t) const {
    if (t == t_k_) return z_k_;
    return prop_.advance(z_k_, u_k_, t - t_k_);
  }

  /// Emits lattice samples and period-boundary samples strictly before t_limit.
  void emit_before(double t_limit) {
    for (;;) {
      const double s = static_cast<double>(next_j_) * dt_;
      const bool s_ok = s <= horizon_ + time_tol(horizon_);
      const double b = static_cast<double>(next_n_) * period_;
      const bool b_ok = next_n_ <= periods_;
      if (!s_ok && !b_ok) return;
      const double c = !s_ok ? b : (!b_ok ? s : std::min(s, b));
      if (c >= t_limit - time_tol(t_limit)) return;
      const Vector x = state_at(c);
      const bool at_boundary = b_ok && std::abs(c - b) <= time_tol(c);
      if (at_boundary) {
        trace_.period_norms.push_back(norm2(x));
        ++next_n_;
      }
      if (s_ok && std::abs(c - s) <= time_tol(c)) ++next_j_;
      push(c, x, false);
    }
  }

  /// Control update at t with state z; `count` > 1 folds that many updates
  /// (the last at t) into one call.
  void fire(double t, Vector z, std::int64_t count, bool emit) {
    t_k_ = t;
    z_k_ = std::move(z);
    u_k_ = dot(u_row_, z_k_);
    trace_.event_count += count;
    if (trace_.event_times.size() < event_cap_) trace_.event_times.push_back(t);
    bool coincide = false;
    if (std::abs(static_cast<double>(next_j_) * dt_ - t) <= time_tol(t)) {
      ++next_j_;
      coincide = true;
    }
    if (next_n_ <= periods_ &&
        std::abs(static_cast<double>(next_n_) * period_ - t) <= time_tol(t)) {
      trace_.period_norms.push_back(norm2(z_k_));
      ++next_n_;
      coincide = true;
    }
    if (emit || coincide) {
      push(t, z_k_, true);
      trace_.omitted_trigger_samples += count - 1;
    } else {
      trace_.omitted_trigger_samples += count;
    }
  }

  bool diverged() {
    bool finite = true;
    for (double v : z_k_) finite = finite && std::isfinite(v);
    if (finite && norm2(z_k_) <= divergence_norm_) return false;
    trace_.diverged_at = t_k_;
    return true;
  }

  SimTrace take() { return std::move(trace_); }

 private:
  void push(double t, const Vector& x, bool triggered) {
    Sample s;
    s.t = t;
    s.x = x;
    s.u = u_k_;
    if (jammer_) s.jammer = jammer_state(*jammer_, t);
    s.triggered = triggered;
    trace_.samples.push_back(std::move(s));
  }

  const ZohPropagator& prop_;
  Vector u_row_;
  double dt_;
  double period_;
  std::size_t periods_;
  double horizon_;
  std::optional<JammerProfile> jammer_;
  std::size_t event_cap_;
  double divergence_norm_;

  double t_k_ = 0.0;
  Vector z_k_;
  double u_k_ = 0.0;
  std::int64_t next_j_ = 0;
  std::size_t next_n_ = 1;
  SimTrace trace_;
};

}  // namespace

SimTrace run_jammed(const CanonicalSystem& sys, const GainLambda& g,
                    const TriggerSchedule& schedule, const SimConfig& cfg,
                    const NumericPolicy& policy) {
  validate(cfg, sys.order());
  if (schedule.periods.size() != cfg.periods ||
      std::abs(schedule.period - cfg.period) > time_tol(cfg.period))
    throw Error(ErrorCode::InvalidInput, "schedule does not match the simulation periods");
  const JammerProfile jammer(schedule.period, schedule.off_cr);
  const double tau = schedule.tau;
  for (const auto& p : schedule.periods) {
    if (p.l_count == 0) continue;
    const double first = p.multiple_time(p.l_first, tau);
    const double last = p.multiple_time(p.l_first + p.l_count - 1, tau);
    if (jammer_state(jammer, first) != JammerState::Sleeping ||
        jammer_state(jammer, last) != JammerState::Sleeping)
      throw Error(ErrorCode::InvalidInput, "schedule triggers while the jammer is active");
  }

  const ZohPropagator prop(sys.Ac, sys.Bc);
  const Matrix m_tau = prop.sampled_map(tau, g.u_row);
  Runner r(prop, g.u_row, cfg, schedule.period, cfg.periods, jammer, cfg.max_events,
           policy.divergence_norm);
  if (r.diverged()) return r.take();

  std::size_t budget = cfg.max_events;
  for (const auto& p : schedule.periods) {
    const std::int64_t l_end = p.l_first + p.l_count;
    std::int64_t prev = std::numeric_limits<std::int64_t>::min();
    std::int64_t l = p.l_first;
    while (l < l_end) {
      const double t = p.multiple_time(l, tau);
      r.emit_before(t);
      Vector z = prev == l - 1 ? m_tau * r.z_k() : r.state_at(t);
      const bool emit = budget > 0;
      if (emit) --budget;
      r.fire(t, std::move(z), 1, emit);
      if (r.diverged()) return r.take();
      prev = l++;
      if (budget > 0 || l >= l_end) continue;

      // Fold every multiple before the next output sample into one power.
      const double next_s = r.next_sample_time();
      std::int64_t stop = l_end - 1;
      if (std::isfinite(next_s)) {
        const double limit = next_s - time_tol(next_s);
        stop = std::min<std::int64_t>(
            stop, static_cast<std::int64_t>(std::floor((limit - p.origin) / tau)));
        while (stop >= l && p.multiple_time(stop, tau) >= limit) --stop;
        while (stop + 1 < l_end && p.multiple_time(stop + 1, tau) < limit) ++stop;
      }
      if (stop > l) {
        const std::int64_t steps = stop - prev;
        Vector z_jump = matrix_power(m_tau, static_cast<std::uint64_t>(steps)) * r.z_k();
        r.fire(p.multiple_time(stop, tau), std::move(z_jump), steps, false);
        if (r.diverged()) return r.take();
        prev = stop;
        l = stop + 1;
      }
    }
    r.emit_before(p.period_end);
    r.fire(p.period_end, r.state_at(p.period_end), 1, true);
    if (r.diverged()) return r.take();
  }
  r.emit_before(r.horizon() + 2.0 * time_tol(r.horizon()));
  return r.take();
}

SimTrace run_event_triggered(const CanonicalSystem& sys, const GainLambda& g,
                             const JordanData& jd, const TriggerThreshold& thr,
                             const SimConfig& cfg, const NumericPolicy& policy) {
  validate(cfg, sys.order());
  if (!(g.lambda > admissible_lambda_bound(sys.order())))
    throw Error(ErrorCode::InadmissibleLambda, "event-triggered run needs admissible lambda");

  const ZohPropagator prop(sys.Ac, sys.Bc);
  const double h = cfg.output_dt / 10.0;
  const ZohPropagator::Step monitor = prop.step(h);
  const double f2 = thr.F_squared;

  Runner r(prop, g.u_row, cfg, cfg.period, cfg.periods, std::nullopt, cfg.max_events,
           policy.divergence_norm);
  if (r.diverged()) return r.take();

  auto violated = [&](const Vector& z) {
    Vector diff = r.z_k();
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= z[i];
    const double e = norm2(jd.T_inv * diff);
    const double xl = norm2(jd.T_inv * z);
    return e * e > f2 * xl * xl;
  };

  const double horizon = r.horizon();
  const auto cap = static_cast<std::int64_t>(cfg.max_events);
  bool done = false;
  while (!done && r.event_count() < cap) {
    const double t0 = r.t_k();
    Vector z = r.z_k();
    for (std::int64_t i = 1;; ++i) {
      const double t = t0 + static_cast<double>(i) * h;
      if (t > horizon) {
        done = true;
        break;
      }
      z = axpy(r.u_k(), monitor.gamma, monitor.phi * z);
      if (!violated(z)) continue;
      if (i == 1) {
        std::ostringstream os;
        os << "event at t = " << t0 << " re-fires within one monitor step (" << h
           << "); use a smaller output_dt";
        throw Error(ErrorCode::MonitorResolution, os.str());
      }
      double lo = t - h, hi = t;
      while (hi - lo > policy.event_bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        if (violated(r.state_at(mid)))
          hi = mid;
        else
          lo = mid;
      }
      r.emit_before(hi);
      r.fire(hi, r.state_at(hi), 1, true);
      if (r.diverged()) return r.take();
      break;
    }
  }
  r.emit_before(horizon + 2.0 * time_tol(horizon));
  return r.take();
}

DecayMetrics decay_metrics(const SimTrace& trace, double period) {
  if (!(period > 0.0)) throw Error(ErrorCode::InvalidInput, "period must be > 0");
  DecayMetrics m;
  std::size_t n = 0;
  for (const auto& s : trace.samples) {
    const double target = static_cast<double>(n) * period;
    if (std::abs(s.t - target) <= 1e-9 * std::max(1.0, target)) {
      m.norms.push_back(norm2(s.x));
      ++n;
    }
  }
  if (m.norms.size() < 3) {
    std::ostringstream os;
    os << "trace spans " << (m.norms.empty() ? 0 : m.norms.size() - 1)
       << " full period(s); decay metrics need at least 2";
    throw Error(ErrorCode::InvalidInput, os.str());
  }
  for (std::size_t k = 1; k < m.norms.size(); ++k) {
    const double prev = m.norms[k - 1], cur = m.norms[k];
    const double ratio = prev == 0.0 ? (cur == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                     : cur / prev;
    m.ratios.push_back(ratio);
  }
  m.max_ratio = *std::max_element(m.ratios.begin(), m.ratios.end());
  m.all_below_one = m.max_ratio < 1.0;
  return m;
}

std::vector<double> lyapunov_at_events(const SimTrace& trace, const JordanData& jd) {
  std::vector<double> v;
  for (const auto& s : trace.samples) {
    if (!s.triggered) continue;
    const double xl = norm2(jd.T_inv * s.x);
    v.push_back(xl * xl);
  }
  return v;
}

}  // namespace ctrl_dos
