#pragma once

#include <cstddef>

#include "ctrl_dos/numerics.hpp"
#include "ctrl_dos/plant.hpp"

namespace ctrl_dos {

/// Gain placing every closed-loop pole at -lambda.
struct GainLambda {
  double lambda = 0.0;
  Vector k;      // k_i = C(n, i) lambda^i, i = 1..n
  Vector u_row;  // applied row (-k_n + a_n, ..., -k_1 + a_1)

  /// B * u_row, the input matrix of the sampled term.
  Matrix bk(const Matrix& b) const { return b * Matrix::row(u_row); }
};

struct JordanData {
  Matrix T;      // columns v_1 .. v_n
  Matrix T_inv;
  Matrix N;      // superdiagonal shift
  double lambda = 0.0;
  double scaled_condition = 0.0;
};

struct TriggerThreshold {
  double sigma = 0.0;
  double F = 0.0;          // bound on |e_lambda| / |x_lambda|
  double F_squared = 0.0;  // sigma (2 lambda - 1 - 2|N|) / |T^-1 B K T|^2
  double norm_N = 0.0;
  double norm_Bbar = 0.0;
};

double binomial(std::size_t n, std::size_t k);

/// Admissibility bound |N| + 1/2 for the shift of order n.
double admissible_lambda_bound(std::size_t n);

GainLambda synthesize_gain(std::size_t n, double lambda, std::span<const double> a);

Matrix closed_loop(const CanonicalSystem& sys, const GainLambda& g);

/// Generalized-eigenvector chain of a closed-loop companion matrix:
/// v_1 spans ker(Acl + lambda I) with first entry 1, and each
/// (Acl + lambda I) v_{j+1} = v_j is solved with the last entry pinned to 0.
JordanData jordan_chain(const Matrix& acl, double lambda,
                        const NumericPolicy& policy = kDefaultPolicy);

/// |T (-lambda I + N) T^{-1} - Acl| / |Acl|
double jordan_reconstruction_error(const JordanData& jd, const Matrix& acl);

TriggerThreshold trigger_threshold(const JordanData& jd, const GainLambda& g,
                                   const Matrix& b, double sigma);

}  // namespace ctrl_dos
