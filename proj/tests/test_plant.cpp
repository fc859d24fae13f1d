#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctrl_dos/error.hpp"
#include "ctrl_dos/plant.hpp"
#include "oracle.hpp"

using namespace ctrl_dos;

namespace {

const Matrix kA3{{0, 1, 0}, {0, 0, 1}, {-3, -2, 3}};
const Matrix kB3{{0}, {0}, {1}};
const Matrix kA5{{0, 1, 0, 0, 0},
                 {0, 0, 1, 0, 0},
                 {0, 0, 0, 1, 0},
                 {0, 0, 0, 0, 1},
                 {-7, 10, -3, 4, -6}};
const Matrix kB5{{0}, {0}, {0}, {0}, {1}};

double rel_diff(const Matrix& a, const Matrix& b) {
  return spectral_norm(a - b) / std::max(1.0, spectral_norm(b));
}

}  // namespace

TEST(LtiSystem, RejectsBadShapesAndValues) {
  EXPECT_THROW(LtiSystem(Matrix(2, 3), Matrix(2, 1)), Error);
  EXPECT_THROW(LtiSystem(Matrix(2, 2), Matrix(3, 1)), Error);
  EXPECT_THROW(LtiSystem(Matrix(2, 2), Matrix(2, 2)), Error);
  EXPECT_THROW(LtiSystem(Matrix(9, 9), Matrix(9, 1)), Error);
  Matrix bad = kA3;
  bad(0, 0) = std::nan("");
  EXPECT_THROW(LtiSystem(bad, kB3), Error);
}

TEST(LtiSystem, UncontrollablePairReportsRank) {
  // Decoupled mode on x1 that the input never reaches.
  const Matrix a{{-1, 0, 0}, {0, 0, 1}, {0, -2, -3}};
  const Matrix b{{0}, {0}, {1}};
  try {
    LtiSystem sys(a, b);
    FAIL() << "uncontrollable pair accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotControllable);
    ASSERT_TRUE(e.rank.has_value());
    EXPECT_EQ(*e.rank, 2);
  }
}

TEST(Canonical, ThreeStateExampleIsAlreadyCanonical) {
  const CanonicalSystem c = to_canonical(LtiSystem(kA3, kB3));
  EXPECT_EQ(c.P, Matrix::identity(3));
  EXPECT_EQ(c.Ac, kA3);
  EXPECT_EQ(c.Bc, kB3);
  ASSERT_EQ(c.a.size(), 3u);
  EXPECT_NEAR(c.a[0], -3.0, 1e-14);
  EXPECT_NEAR(c.a[1], 2.0, 1e-14);
  EXPECT_NEAR(c.a[2], 3.0, 1e-14);
}

TEST(Canonical, FiveStateExampleIsAlreadyCanonical) {
  const CanonicalSystem c = to_canonical(LtiSystem(kA5, kB5));
  EXPECT_EQ(c.P, Matrix::identity(5));
  const Vector expected{6, -4, 3, -10, 7};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(c.a[i], expected[i], 1e-13);
  EXPECT_LT(rel_diff(c.Ac, kA5), 1e-14);
}

TEST(Canonical, CompanionLastRowOrdering) {
  const Vector a{1, 2, 3};
  const Matrix c = companion(a);
  EXPECT_EQ(c(2, 0), -3.0);
  EXPECT_EQ(c(2, 1), -2.0);
  EXPECT_EQ(c(2, 2), -1.0);
  EXPECT_EQ(c(0, 1), 1.0);
  EXPECT_EQ(c(1, 2), 1.0);
}

TEST(Canonical, RandomPlantsSatisfyInvariants) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const auto p = oracle::random_plant(rng, n);
    const CanonicalSystem c = to_canonical(LtiSystem(p.a, p.b));
    // Similarity: A P = P Ac and P Bc = B.
    EXPECT_LT(rel_diff(p.a * c.P, c.P * c.Ac), 1e-9) << "trial " << trial;
    EXPECT_LT(rel_diff(c.P * c.Bc, p.b), 1e-12);
    // Companion coefficients agree with an independent determinant route.
    const Vector ref = oracle::charpoly_interp(oracle::from(p.a));
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_NEAR(c.a[i], ref[i + 1], 1e-9 * std::max(1.0, std::abs(ref[i + 1])));
    EXPECT_EQ(c.Ac, companion(c.a));
  }
}

TEST(Canonical, IdempotentOnCanonicalInput) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = oracle::random_plant(rng, 4);
    const CanonicalSystem once = to_canonical(LtiSystem(p.a, p.b));
    const CanonicalSystem twice = to_canonical(LtiSystem(once.Ac, once.Bc));
    EXPECT_EQ(twice.P, Matrix::identity(4));
    for (std::size_t i = 0; i < 4; ++i)
      EXPECT_NEAR(twice.a[i], once.a[i], 1e-12 * std::max(1.0, std::abs(once.a[i])));
  }
}

TEST(Jammer, ValidatesWindow) {
  EXPECT_THROW(JammerProfile(0.0, 0.0), Error);
  EXPECT_THROW(JammerProfile(1.0, 0.0), Error);
  EXPECT_THROW(JammerProfile(1.0, 1.0), Error);
  EXPECT_THROW(JammerProfile(-1.0, 0.5), Error);
  const JammerProfile j(2.0, 0.5);
  EXPECT_DOUBLE_EQ(j.on_cr(), 1.5);
}

TEST(Jammer, SleepingThenActiveWithBoundaryConvention) {
  const JammerProfile j(1.0, 0.1);
  EXPECT_EQ(jammer_state(j, 0.0), JammerState::Sleeping);
  EXPECT_EQ(jammer_state(j, 0.05), JammerState::Sleeping);
  EXPECT_EQ(jammer_state(j, 0.1), JammerState::Active);
  EXPECT_EQ(jammer_state(j, 0.5), JammerState::Active);
  for (int n = 1; n <= 1000; ++n) {
    const double t = n * 1.0;
    EXPECT_EQ(jammer_state(j, t), JammerState::Sleeping) << "t = " << t;
    EXPECT_EQ(jammer_state(j, t - 1e-6), JammerState::Active);
  }
  // One rounding step below a period boundary still counts as the boundary.
  EXPECT_EQ(jammer_state(j, std::nextafter(10.0, 0.0)), JammerState::Sleeping);
  EXPECT_THROW(jammer_state(j, -0.1), Error);
}

TEST(Jammer, PeriodicProperty) {
  const JammerProfile j(0.7, 0.3);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 0.7);
  for (int trial = 0; trial < 500; ++trial) {
    const double t = u(rng);
    const int k = trial % 50;
    EXPECT_EQ(jammer_state(j, t), jammer_state(j, t + k * 0.7)) << t << " + " << k << "T";
  }
}
