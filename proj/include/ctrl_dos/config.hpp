#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>

#include "ctrl_dos/numerics.hpp"
#include "ctrl_dos/plant.hpp"
#include "ctrl_dos/simulator.hpp"
#include "ctrl_dos/trigger.hpp"

namespace ctrl_dos {

struct SweepSpec {
  double lambda_start = 0.0;
  double lambda_stop = 0.0;
  double lambda_step = 0.0;
};

struct SimSpec {
  Vector x0;
  std::size_t periods = 5;
  double output_dt = 1e-3;
  double lambda = 0.0;
  SimMode mode = SimMode::JammedSchedule;
  std::size_t max_events = 100'000;
};

/// Parsed run configuration. Every block except `system` is optional; the
/// command that needs a missing block reports it.
struct RunConfig {
  std::size_t n = 0;
  Matrix A;
  Matrix B;
  std::optional<JammerProfile> jammer;
  double sigma = 0.1;
  TauStopLevel stop_level = TauStopLevel::Sigma;
  std::optional<SweepSpec> sweep;
  std::optional<SimSpec> sim;
  bool c3_half_exponent = false;
  bool resync_multiples = false;
};

/// JSON config with strict keys. Failures raise ErrorCode::Config.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace ctrl_dos
