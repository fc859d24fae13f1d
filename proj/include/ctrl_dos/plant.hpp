#pragma once

#include <cstddef>

#include "ctrl_dos/numerics.hpp"

namespace ctrl_dos {

inline constexpr std::size_t kMaxOrder = 8;

/// Single-input LTI plant  x' = A x + B u. Construction rejects inconsistent
/// shapes, non-finite entries and uncontrollable pairs (NotControllable,
/// with the controllability rank attached).
class LtiSystem {
 public:
  LtiSystem(Matrix a, Matrix b, const NumericPolicy& policy = kDefaultPolicy);

  const Matrix& A() const noexcept { return a_; }
  const Matrix& B() const noexcept { return b_; }
  std::size_t order() const noexcept { return a_.rows(); }

 private:
  Matrix a_;
  Matrix b_;
};

/// [B, AB, ..., A^{n-1}B]
Matrix controllability_matrix(const Matrix& a, const Matrix& b);

/// Companion realization: x = P x_c, Ac = P^{-1} A P, Bc = e_n.
/// `a` holds (a_1, ..., a_n) with det(sI - A) = s^n + a_1 s^{n-1} + ... + a_n,
/// so the last row of Ac reads (-a_n, ..., -a_1).
struct CanonicalSystem {
  Matrix Ac;
  Matrix Bc;
  Matrix P;
  Vector a;

  std::size_t order() const noexcept { return Ac.rows(); }
};

/// Companion matrix with last row (-a_n, ..., -a_1).
Matrix companion(std::span<const double> a);

CanonicalSystem to_canonical(const LtiSystem& sys,
                             const NumericPolicy& policy = kDefaultPolicy);

// ------------------------------------------------------------- jammer

enum class JammerState { Sleeping, Active };

const char* to_string(JammerState s);

/// Worst-case PWM jammer: within each period of length T the channel is open
/// on [0, T_off_cr) and jammed on [T_off_cr, T).
class JammerProfile {
 public:
  JammerProfile(double period, double off_cr);

  double period() const noexcept { return period_; }
  double off_cr() const noexcept { return off_cr_; }
  double on_cr() const noexcept { return period_ - off_cr_; }

 private:
  double period_;
  double off_cr_;
};

/// Phase of t inside its period, snapped to 0 when t sits on a period
/// boundary up to rounding (so t = k*T is always Sleeping).
double jammer_phase(const JammerProfile& j, double t);

JammerState jammer_state(const JammerProfile& j, double t);

}  // namespace ctrl_dos
