#include <gtest/gtest.h>

#include "ctrl_dos/config.hpp"
#include "ctrl_dos/error.hpp"

using namespace ctrl_dos;

namespace {

constexpr const char* kFull = R"({
  "system": {"n": 2, "A": [0, 1, -2, -3], "B": [0, 1]},
  "jammer": {"T": 2.0, "T_off_cr": 0.4},
  "trigger": {"sigma": 0.2, "stop_level": "F"},
  "sweep": {"lambda_start": 2, "lambda_stop": 20, "lambda_step": 2},
  "sim": {"x0": [1, 0], "periods": 3, "output_dt": 0.01, "lambda": 12, "mode": "event",
          "max_events": 50},
  "flags": {"c3_half_exponent": true, "resync_multiples": true}
})";

ErrorCode code_of(const char* text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::OutOfRange;  // sentinel: nothing thrown
}

}  // namespace

TEST(Config, ParsesEveryBlock) {
  const RunConfig c = parse_config(kFull);
  EXPECT_EQ(c.n, 2u);
  EXPECT_EQ(c.A, (Matrix{{0, 1}, {-2, -3}}));
  EXPECT_EQ(c.B, (Matrix{{0}, {1}}));
  ASSERT_TRUE(c.jammer.has_value());
  EXPECT_EQ(c.jammer->period(), 2.0);
  EXPECT_EQ(c.jammer->off_cr(), 0.4);
  EXPECT_EQ(c.sigma, 0.2);
  EXPECT_EQ(c.stop_level, TauStopLevel::ThresholdF);
  ASSERT_TRUE(c.sweep.has_value());
  EXPECT_EQ(c.sweep->lambda_step, 2.0);
  ASSERT_TRUE(c.sim.has_value());
  EXPECT_EQ(c.sim->mode, SimMode::EventTriggered);
  EXPECT_EQ(c.sim->periods, 3u);
  EXPECT_EQ(c.sim->max_events, 50u);
  EXPECT_TRUE(c.c3_half_exponent);
  EXPECT_TRUE(c.resync_multiples);
}

TEST(Config, MinimalSystemOnly) {
  const RunConfig c = parse_config(R"({"system": {"n": 1, "A": [2], "B": [1]}})");
  EXPECT_FALSE(c.jammer.has_value());
  EXPECT_FALSE(c.sweep.has_value());
  EXPECT_FALSE(c.sim.has_value());
  EXPECT_EQ(c.sigma, 0.1);
  EXPECT_EQ(c.stop_level, TauStopLevel::Sigma);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(code_of(R"({"system": {"n": 1, "A": [2], "B": [1]}, "extra": 1})"),
            ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 1, "A": [2], "B": [1], "C": [1]}})"),
            ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 1, "A": [2], "B": [1]},
                        "flags": {"c3_half": true}})"),
            ErrorCode::Config);
}

TEST(Config, ShapeAndValueErrors) {
  EXPECT_EQ(code_of(R"({"system": {"n": 2, "A": [1, 2, 3], "B": [0, 1]}})"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 2, "A": [1, 2, 3, 4], "B": [1]}})"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 0, "A": [], "B": []}})"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 1, "A": ["x"], "B": [1]}})"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 1, "A": [2], "B": [1]},
                        "jammer": {"T": 1, "T_off_cr": 1.5}})"),
            ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 1, "A": [2], "B": [1]}, "trigger": {"sigma": 1}})"),
            ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 1, "A": [2], "B": [1]},
                        "sweep": {"lambda_start": 3, "lambda_stop": 1, "lambda_step": 1}})"),
            ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 1, "A": [2], "B": [1]},
                        "sim": {"x0": [1], "lambda": 3, "mode": "fast"}})"),
            ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"system": {"n": 1, "A": [2], "B": [1]},
                        "sim": {"x0": [1, 2], "lambda": 3}})"),
            ErrorCode::Config);
  EXPECT_EQ(code_of("{not json"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"jammer": {"T": 1, "T_off_cr": 0.5}})"), ErrorCode::Config);
}

TEST(Config, MissingFile) {
  try {
    load_config("/nonexistent/ctrl_dos_config.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config);
  }
}
