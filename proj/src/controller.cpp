#include "ctrl_dos/controller.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

#include "ctrl_dos/error.hpp"

namespace ctrl_dos {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<double>(r);
}

double admissible_lambda_bound(std::size_t n) {
  // The shift has unit norm for n >= 2 and is the zero 1x1 matrix otherwise.
  return (n >= 2 ? 1.0 : 0.0) + 0.5;
}

GainLambda synthesize_gain(std::size_t n, double lambda, std::span<const double> a) {
  if (!(std::isfinite(lambda) && lambda > 0.0))
    throw Error(ErrorCode::InvalidParameter, "lambda must be a finite value > 0");
  if (a.size() != n || n == 0)
    throw Error(ErrorCode::InvalidInput, "coefficient vector must have length n");
  GainLambda g;
  g.lambda = lambda;
  g.k.resize(n);
  g.u_row.resize(n);
  for (std::size_t i = 1; i <= n; ++i)
    g.k[i - 1] = binomial(n, i) * std::pow(lambda, static_cast<double>(i));
  for (std::size_t j = 0; j < n; ++j) g.u_row[j] = -g.k[n - 1 - j] + a[n - 1 - j];
  return g;
}

Matrix closed_loop(const CanonicalSystem& sys, const GainLambda& g) {
  const std::size_t n = sys.order();
  if (g.u_row.size() != n) throw Error(ErrorCode::InvalidInput, "gain dimension mismatch");
  return sys.Ac + sys.Bc * Matrix::row(g.u_row);
}

JordanData jordan_chain(const Matrix& acl, double lambda, const NumericPolicy& policy) {
  const std::size_t n = acl.rows();
  if (!acl.square() || n == 0) throw Error(ErrorCode::InvalidInput, "Acl must be square");
  const Matrix m = acl + Matrix::identity(n) * lambda;

  JordanData jd;
  jd.lambda = lambda;
  jd.T = Matrix(n, n);
  jd.N = Matrix(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) jd.N(i, i + 1) = 1.0;

  try {
    Vector v(n, 0.0);
    v[0] = 1.0;
    if (n > 1) v = least_squares_particular(m, Vector(n, 0.0), 0, 1.0, policy);
    jd.T.set_col(0, v);
    for (std::size_t j = 1; j < n; ++j) {
      v = least_squares_particular(m, v, n - 1, 0.0, policy);
      jd.T.set_col(j, v);
    }
  } catch (const Error& e) {
    Error wrapped(ErrorCode::NumericalFailure,
                  std::string("jordan_chain: chain solve failed (lambda too extreme?): ") +
                      e.what());
    wrapped.residual = e.residual;
    throw wrapped;
  }

  const EquilibratedInverse inv = inverse_equilibrated(jd.T, policy);
  jd.T_inv = inv.inverse;
  jd.scaled_condition = inv.scaled_condition;
  if (!(jd.scaled_condition <= policy.equilibrated_condition_limit)) {
    std::ostringstream os;
    os << "jordan_chain: equilibrated condition " << jd.scaled_condition << " exceeds "
       << policy.equilibrated_condition_limit;
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  const double rec = jordan_reconstruction_error(jd, acl);
  if (!(rec <= policy.jordan_reconstruction_tol)) {
    std::ostringstream os;
    os << "jordan_chain: reconstruction error " << rec << " at lambda " << lambda;
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  return jd;
}

double jordan_reconstruction_error(const JordanData& jd, const Matrix& acl) {
  const std::size_t n = acl.rows();
  const Matrix j = jd.N - Matrix::identity(n) * jd.lambda;
  return spectral_norm(jd.T * j * jd.T_inv - acl) / spectral_norm(acl);
}

TriggerThreshold trigger_threshold(const JordanData& jd, const GainLambda& g,
                                   const Matrix& b, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw Error(ErrorCode::InvalidParameter, "sigma must lie in (0, 1)");
  TriggerThreshold thr;
  thr.sigma = sigma;
  thr.norm_N = spectral_norm(jd.N);
  const double margin = 2.0 * jd.lambda - 1.0 - 2.0 * thr.norm_N;
  if (!(margin > 0.0)) {
    std::ostringstream os;
    os << "lambda " << jd.lambda << " is not admissible: need lambda > |N| + 1/2 = "
       << thr.norm_N + 0.5;
    throw Error(ErrorCode::InadmissibleLambda, os.str());
  }
  thr.norm_Bbar = spectral_norm(jd.T_inv * g.bk(b) * jd.T);
  thr.F_squared = sigma * margin / (thr.norm_Bbar * thr.norm_Bbar);
  thr.F = std::sqrt(sigma * margin) / thr.norm_Bbar;
  return thr;
}

}  // namespace ctrl_dos
