#include <gtest/gtest.h>

#include <cmath>

#include "ctrl_dos/analysis.hpp"
#include "ctrl_dos/error.hpp"
#include "ctrl_dos/simulator.hpp"
#include "oracle.hpp"

using namespace ctrl_dos;

namespace {

CanonicalSystem example3() {
  return to_canonical(LtiSystem(Matrix{{0, 1, 0}, {0, 0, 1}, {-3, -2, 3}}, Matrix{{0}, {0}, {1}}));
}

SimConfig jammed_config(Vector x0, std::size_t periods) {
  SimConfig cfg;
  cfg.x0 = std::move(x0);
  cfg.periods = periods;
  cfg.period = 1.0;
  cfg.output_dt = 1e-3;
  return cfg;
}

SimTrace run(const CanonicalSystem& c, double lambda, double off, const SimConfig& cfg) {
  const JammerProfile j(1.0, off);
  const GainLambda g = synthesize_gain(c.order(), lambda, c.a);
  const TauResult tau = compute_tau(c, g, 0.1);
  return run_jammed(c, g, build_schedule(tau, j, cfg.periods), cfg);
}

}  // namespace

TEST(Propagator, AgreesWithRk4OverOnePeriod) {
  const CanonicalSystem c = example3();
  const GainLambda g = synthesize_gain(3, 2.0, c.a);
  const ZohPropagator prop(c.Ac, c.Bc);
  const Vector x0{1, 1, 1};
  const double u = dot(g.u_row, x0);
  const Vector exact = prop.advance(x0, u, 1.0);
  const Matrix a = c.Ac;
  const VectorField f = [&](double, std::span<const double> x) {
    Vector dx = a * x;
    dx[2] += u;
    return dx;
  };
  const Vector rk = rk4_integrate(f, x0, 0.0, 1.0, 1e-5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(exact[i], rk[i], 1e-7 * std::max(1.0, std::abs(rk[i])));
}

TEST(Propagator, SampledMapPowers) {
  const CanonicalSystem c = example3();
  const GainLambda g = synthesize_gain(3, 20.0, c.a);
  const ZohPropagator prop(c.Ac, c.Bc);
  const Matrix m = prop.sampled_map(1e-3, g.u_row);
  Matrix by_hand = Matrix::identity(3);
  for (int k = 0; k < 37; ++k) by_hand = by_hand * m;
  const Matrix fast = matrix_power(m, 37);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_NEAR(fast(i, j), by_hand(i, j), 1e-12 * std::max(1.0, std::abs(by_hand(i, j))));
  EXPECT_EQ(matrix_power(m, 0), Matrix::identity(3));
}

TEST(Propagator, MatchesTaylorOracleOnAugmentedMatrix) {
  const CanonicalSystem c = example3();
  const ZohPropagator prop(c.Ac, c.Bc);
  const double h = 0.3;
  const ZohPropagator::Step s = prop.step(h);
  oracle::Mat aug(4, oracle::Vec(4, 0.0));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) aug[i][j] = c.Ac(i, j) * h;
    aug[i][3] = c.Bc(i, 0) * h;
  }
  const auto e = oracle::expm_taylor(aug);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s.phi(i, j), e[i][j], 1e-13);
    EXPECT_NEAR(s.gamma[i], e[i][3], 1e-13);
  }
}

TEST(Jammed, ZeroInitialStateStaysZero) {
  const CanonicalSystem c = example3();
  const SimTrace t = run(c, 10.0, 0.1, jammed_config({0, 0, 0}, 3));
  for (const auto& s : t.samples) {
    for (double v : s.x) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(s.u, 0.0);
  }
  EXPECT_FALSE(t.diverged_at.has_value());
}

TEST(Jammed, LargeLambdaDecaysWithinCertificate) {
  const CanonicalSystem c = example3();
  const SimTrace t = run(c, 1500.0, 0.1, jammed_config({1, 1, 1}, 5));
  const DecayMetrics m = decay_metrics(t, 1.0);
  const double cl = analyze_lambda(c, JammerProfile(1.0, 0.1), 0.1, 1500.0).C;
  ASSERT_EQ(m.norms.size(), 6u);
  for (std::size_t n = 1; n < m.norms.size(); ++n) {
    EXPECT_LT(m.norms[n], m.norms[n - 1]);
    EXPECT_LE(m.norms[n], std::pow(cl, static_cast<double>(n)) * m.norms[0]);
  }
  EXPECT_TRUE(m.all_below_one);
  EXPECT_LE(m.max_ratio, cl);
  EXPECT_GT(t.event_count, 1'000'000'000LL);
}

TEST(Jammed, SmallLambdaGrows) {
  const CanonicalSystem c = example3();
  const SimTrace t = run(c, 2.0, 0.1, jammed_config({1, 1, 1}, 5));
  if (t.diverged_at) {
    SUCCEED();
  } else {
    const DecayMetrics m = decay_metrics(t, 1.0);
    EXPECT_GT(m.norms.back(), m.norms.front());
    EXPECT_GT(m.max_ratio, 1.0);
  }
}

TEST(Jammed, TriggersOnlyWhileSleepingAndHoldIsPiecewiseConstant) {
  const CanonicalSystem c = example3();
  const SimTrace t = run(c, 5.0, 0.5, jammed_config({1, -1, 0.5}, 2));
  ASSERT_FALSE(t.samples.empty());
  double prev_t = -1.0, held = t.samples.front().u;
  for (const auto& s : t.samples) {
    EXPECT_GE(s.t, prev_t);
    prev_t = s.t;
    ASSERT_TRUE(s.jammer.has_value());
    if (s.triggered) {
      EXPECT_EQ(*s.jammer, JammerState::Sleeping) << "t=" << s.t;
      held = s.u;
    } else {
      EXPECT_EQ(s.u, held) << "u changed without a trigger at t=" << s.t;
    }
  }
  EXPECT_EQ(t.period_norms.size(), 3u);
}

TEST(Jammed, ExplicitAndFoldedTriggersAgree) {
  const CanonicalSystem c = example3();
  SimConfig explicit_cfg = jammed_config({1, 1, 1}, 2);
  SimConfig folded_cfg = explicit_cfg;
  folded_cfg.max_events = 3;
  const SimTrace a = run(c, 40.0, 0.5, explicit_cfg);
  const SimTrace b = run(c, 40.0, 0.5, folded_cfg);
  EXPECT_EQ(a.event_count, b.event_count);
  EXPECT_GT(b.omitted_trigger_samples, 0);
  ASSERT_EQ(a.period_norms.size(), b.period_norms.size());
  for (std::size_t n = 0; n < a.period_norms.size(); ++n)
    EXPECT_NEAR(a.period_norms[n], b.period_norms[n], 1e-9 * a.period_norms[n]);
}

TEST(Jammed, RejectsMismatchedInput) {
  const CanonicalSystem c = example3();
  EXPECT_THROW(run(c, 10.0, 0.1, jammed_config({1, 1}, 2)), Error);
  SimConfig bad = jammed_config({1, 1, 1}, 2);
  bad.output_dt = 0.0;
  EXPECT_THROW(run(c, 10.0, 0.1, bad), Error);
}

TEST(EventTriggered, GapsRespectMinimumInterEventTime) {
  const CanonicalSystem c = example3();
  const double l = 10.0;
  const GainLambda g = synthesize_gain(3, l, c.a);
  const JordanData jd = jordan_chain(closed_loop(c, g), l);
  const TriggerThreshold thr = trigger_threshold(jd, g, c.Bc, 0.1);
  const double tau = compute_tau(c, g, 0.1).tau_lambda;
  SimConfig cfg;
  cfg.x0 = {1, 1, 1};
  cfg.periods = 1;
  cfg.period = 0.05;
  cfg.output_dt = 1e-5;
  cfg.mode = SimMode::EventTriggered;
  cfg.max_events = 150;
  const SimTrace t = run_event_triggered(c, g, jd, thr, cfg);
  ASSERT_GE(t.event_times.size(), 100u);
  for (std::size_t k = 1; k < t.event_times.size(); ++k)
    EXPECT_GE(t.event_times[k] - t.event_times[k - 1], tau);
  const auto v = lyapunov_at_events(t, jd);
  for (std::size_t k = 1; k < v.size(); ++k) EXPECT_LT(v[k], v[k - 1]);
  for (const auto& s : t.samples) EXPECT_FALSE(s.jammer.has_value());
}

TEST(EventTriggered, CoarseMonitorIsReported) {
  const CanonicalSystem c = example3();
  const double l = 10.0;
  const GainLambda g = synthesize_gain(3, l, c.a);
  const JordanData jd = jordan_chain(closed_loop(c, g), l);
  const TriggerThreshold thr = trigger_threshold(jd, g, c.Bc, 0.1);
  SimConfig cfg;
  cfg.x0 = {1, 1, 1};
  cfg.periods = 1;
  cfg.period = 0.05;
  cfg.output_dt = 1e-2;
  cfg.mode = SimMode::EventTriggered;
  try {
    run_event_triggered(c, g, jd, thr, cfg);
    FAIL() << "coarse monitor accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MonitorResolution);
  }
}

TEST(DecayMetrics, GeometricSyntheticTrace) {
  SimTrace t;
  double scale = 1.0;
  for (int n = 0; n <= 4; ++n) {
    Sample s;
    s.t = n * 2.0;
    s.x = {3 * scale, 4 * scale};
    t.samples.push_back(s);
    scale *= 0.25;
  }
  const DecayMetrics m = decay_metrics(t, 2.0);
  ASSERT_EQ(m.ratios.size(), 4u);
  for (double r : m.ratios) EXPECT_DOUBLE_EQ(r, 0.25);
  EXPECT_TRUE(m.all_below_one);
  EXPECT_DOUBLE_EQ(m.norms.front(), 5.0);
}

TEST(DecayMetrics, SinglePeriodIsRejected) {
  SimTrace t;
  for (int n = 0; n <= 1; ++n) {
    Sample s;
    s.t = n;
    s.x = {1.0};
    t.samples.push_back(s);
  }
  try {
    decay_metrics(t, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}
