#include "ctrl_dos/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ctrl_dos/error.hpp"

namespace ctrl_dos {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::Config, what); }

void only_keys(const json& obj, const std::string& where,
               std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) fail(where + ": unknown key '" + key + "'");
  }
}

const json& need(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing '" + key + "'");
  return *it;
}

double real(const json& v, const std::string& what) {
  if (!v.is_number()) fail(what + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(what + ": must be finite");
  return d;
}

std::size_t count(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(what + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

Vector reals(const json& v, const std::string& what) {
  if (!v.is_array()) fail(what + ": expected a list of numbers");
  Vector out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(real(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

bool flag(const json& v, const std::string& what) {
  if (!v.is_boolean()) fail(what + ": expected true or false");
  return v.get<bool>();
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  only_keys(root, "config", {"system", "jammer", "trigger", "sweep", "sim", "flags"});
  RunConfig cfg;

  const json& sys = need(root, "config", "system");
  only_keys(sys, "system", {"n", "A", "B"});
  cfg.n = count(need(sys, "system", "n"), "system.n");
  if (cfg.n < 1 || cfg.n > kMaxOrder)
    fail("system.n must be in 1.." + std::to_string(kMaxOrder));
  const Vector a = reals(need(sys, "system", "A"), "system.A");
  const Vector b = reals(need(sys, "system", "B"), "system.B");
  if (a.size() != cfg.n * cfg.n) fail("system.A must hold n*n row-major entries");
  if (b.size() != cfg.n) fail("system.B must hold n entries");
  cfg.A = Matrix::from_row_major(cfg.n, cfg.n, a);
  cfg.B = Matrix::from_row_major(cfg.n, 1, b);

  if (const auto it = root.find("jammer"); it != root.end()) {
    only_keys(*it, "jammer", {"T", "T_off_cr"});
    const double T = real(need(*it, "jammer", "T"), "jammer.T");
    const double off = real(need(*it, "jammer", "T_off_cr"), "jammer.T_off_cr");
    try {
      cfg.jammer.emplace(T, off);
    } catch (const Error& e) {
      fail(std::string("jammer: ") + e.what());
    }
  }

  if (const auto it = root.find("trigger"); it != root.end()) {
    only_keys(*it, "trigger", {"sigma", "stop_level"});
    if (it->contains("sigma")) cfg.sigma = real((*it)["sigma"], "trigger.sigma");
    if (it->contains("stop_level")) {
      const json& s = (*it)["stop_level"];
      if (s == "sigma")
        cfg.stop_level = TauStopLevel::Sigma;
      else if (s == "F")
        cfg.stop_level = TauStopLevel::ThresholdF;
      else
        fail("trigger.stop_level must be \"sigma\" or \"F\"");
    }
  }
  if (!(cfg.sigma > 0.0 && cfg.sigma < 1.0)) fail("trigger.sigma must lie in (0, 1)");

  if (const auto it = root.find("sweep"); it != root.end()) {
    only_keys(*it, "sweep", {"lambda_start", "lambda_stop", "lambda_step"});
    SweepSpec s;
    s.lambda_start = real(need(*it, "sweep", "lambda_start"), "sweep.lambda_start");
    s.lambda_stop = real(need(*it, "sweep", "lambda_stop"), "sweep.lambda_stop");
    s.lambda_step = real(need(*it, "sweep", "lambda_step"), "sweep.lambda_step");
    if (!(s.lambda_step > 0.0)) fail("sweep.lambda_step must be > 0");
    if (!(s.lambda_stop >= s.lambda_start)) fail("sweep.lambda_stop must be >= lambda_start");
    cfg.sweep = s;
  }

  if (const auto it = root.find("sim"); it != root.end()) {
    only_keys(*it, "sim", {"x0", "periods", "output_dt", "lambda", "mode", "max_events"});
    SimSpec s;
    s.x0 = reals(need(*it, "sim", "x0"), "sim.x0");
    if (s.x0.size() != cfg.n) fail("sim.x0 must hold n entries");
    s.lambda = real(need(*it, "sim", "lambda"), "sim.lambda");
    if (!(s.lambda > 0.0)) fail("sim.lambda must be > 0");
    if (it->contains("periods")) s.periods = count((*it)["periods"], "sim.periods");
    if (s.periods < 1) fail("sim.periods must be >= 1");
    if (it->contains("output_dt")) s.output_dt = real((*it)["output_dt"], "sim.output_dt");
    if (!(s.output_dt > 0.0)) fail("sim.output_dt must be > 0");
    if (it->contains("max_events")) s.max_events = count((*it)["max_events"], "sim.max_events");
    if (it->contains("mode")) {
      const json& m = (*it)["mode"];
      if (m == "jammed")
        s.mode = SimMode::JammedSchedule;
      else if (m == "event")
        s.mode = SimMode::EventTriggered;
      else
        fail("sim.mode must be \"jammed\" or \"event\"");
    }
    cfg.sim = s;
  }

  if (const auto it = root.find("flags"); it != root.end()) {
    only_keys(*it, "flags", {"c3_half_exponent", "resync_multiples"});
    if (it->contains("c3_half_exponent"))
      cfg.c3_half_exponent = flag((*it)["c3_half_exponent"], "flags.c3_half_exponent");
    if (it->contains("resync_multiples"))
      cfg.resync_multiples = flag((*it)["resync_multiples"], "flags.resync_multiples");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace ctrl_dos
