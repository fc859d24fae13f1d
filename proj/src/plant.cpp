#include "ctrl_dos/plant.hpp"

#include <cmath>
#include <sstream>

#include "ctrl_dos/error.hpp"

namespace ctrl_dos {

LtiSystem::LtiSystem(Matrix a, Matrix b, const NumericPolicy& policy)
    : a_(std::move(a)), b_(std::move(b)) {
  const std::size_t n = a_.rows();
  if (n == 0 || !a_.square())
    throw Error(ErrorCode::InvalidInput, "A must be a non-empty square matrix");
  if (n > kMaxOrder) throw Error(ErrorCode::InvalidInput, "plant order exceeds the n <= 8 cap");
  if (b_.rows() != n || b_.cols() != 1)
    throw Error(ErrorCode::InvalidInput, "B must be an n x 1 column");
  if (!a_.all_finite() || !b_.all_finite())
    throw Error(ErrorCode::InvalidInput, "A and B must be finite");

  const int r = rank(controllability_matrix(a_, b_), policy.rank_tol);
  if (r < static_cast<int>(n)) {
    std::ostringstream os;
    os << "pair (A, B) is not controllable: controllability rank " << r << " < " << n;
    Error e(ErrorCode::NotControllable, os.str());
    e.rank = r;
    throw e;
  }
}

Matrix controllability_matrix(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  Matrix c(n, n);
  Vector col = b.col(0);
  for (std::size_t j = 0; j < n; ++j) {
    c.set_col(j, col);
    col = a * col;
  }
  return c;
}

Matrix companion(std::span<const double> a) {
  const std::size_t n = a.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
  for (std::size_t j = 0; j < n; ++j) m(n - 1, j) = -a[n - 1 - j];
  return m;
}

CanonicalSystem to_canonical(const LtiSystem& sys, const NumericPolicy& policy) {
  const std::size_t n = sys.order();
  const Vector cp = characteristic_polynomial(sys.A());
  Vector a(cp.begin() + 1, cp.end());

  // P = [B, AB, ..., A^{n-1}B] * W, W the upper-left Hankel of (a_{n-1}, ..., a_1, 1).
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; i + j < n; ++j) {
      const std::size_t idx = n - 1 - i - j;  // coefficient index into (1, a_1, ...)
      w(i, j) = idx == 0 ? 1.0 : a[idx - 1];
    }
  Matrix p = controllability_matrix(sys.A(), sys.B()) * w;

  // Snap exact identities (already-canonical inputs) so downstream
  // consumers see P = I bit-for-bit.
  const Matrix id = Matrix::identity(n);
  if ((p - id).max_abs() <= 1e-14) p = id;

  Matrix bc(n, 1);
  bc(n - 1, 0) = 1.0;
  Matrix ac = companion(a);

  const Matrix pinv = inverse(p, policy);
  const Matrix back = pinv * sys.A() * p;
  const double scale = std::max(1.0, spectral_norm(ac));
  if (spectral_norm(back - ac) > 1e-8 * scale)
    throw Error(ErrorCode::NumericalFailure,
                "to_canonical: similarity transform is too ill-conditioned");
  return {std::move(ac), std::move(bc), std::move(p), std::move(a)};
}

// -------------------------------------------------------------- jammer

const char* to_string(JammerState s) {
  return s == JammerState::Sleeping ? "sleeping" : "active";
}

JammerProfile::JammerProfile(double period, double off_cr) : period_(period), off_cr_(off_cr) {
  if (!(std::isfinite(period) && period > 0.0))
    throw Error(ErrorCode::InvalidParameter, "jammer period T must be > 0");
  if (!(std::isfinite(off_cr) && off_cr > 0.0 && off_cr < period))
    throw Error(ErrorCode::InvalidParameter, "jammer T_off_cr must lie in (0, T)");
}

double jammer_phase(const JammerProfile& j, double t) {
  const double period = j.period();
  double phase = std::fmod(t, period);
  const double snap = 1e-12 * period * std::max(1.0, t / period);
  if (period - phase <= snap || phase <= snap) phase = 0.0;
  return phase;
}

JammerState jammer_state(const JammerProfile& j, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidParameter, "jammer_state: t must be >= 0");
  return jammer_phase(j, t) < j.off_cr() ? JammerState::Sleeping : JammerState::Active;
}

}  // namespace ctrl_dos
