#pragma once

// Small dense-matrix kernel. Everything here is sized for plants of order
// n <= 8 plus the (n+1)-dimensional augmented propagators built on top.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace ctrl_dos {

/// Tolerances shared by every module. Defaults are the values the test
/// and acceptance suites are written against.
struct NumericPolicy {
  double symmetry_tol = 1e-12;        // relative to max |S_ij|
  double residual_tol = 1e-9;         // solve / least-squares backward error
  double rank_tol = 1e-9;             // pivot threshold relative to max |M_ij|
  int jacobi_max_sweeps = 64;
  double jordan_reconstruction_tol = 1e-8;
  double equilibrated_condition_limit = 1e12;
  double divergence_norm = 1e12;
  double tau_max_step = 1e-4;
  double tau_steps_per_tau = 100.0;
  double tau_bisect_abs = 1e-10;
  double tau_bisect_rel = 1e-12;
  double event_bisect_tol = 1e-9;
};

inline constexpr NumericPolicy kDefaultPolicy{};

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Row-major nested initializer: Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_row_major(std::size_t rows, std::size_t cols,
                               std::span<const double> entries);
  static Matrix column(std::span<const double> v);
  static Matrix row(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }

  Vector col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> v);

  Matrix transpose() const;
  bool all_finite() const;
  double max_abs() const;
  double norm1() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double norm2(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);

/// Largest singular value, via the top eigenvalue of M^T M.
double spectral_norm(const Matrix& m);

struct SymmetricEigen {
  Vector values;  // ascending
  Matrix vectors; // column j pairs with values[j]
};

/// Cyclic Jacobi. Rejects inputs that are not symmetric within
/// `symmetry_tol * max|S_ij|`.
SymmetricEigen sym_eigen(const Matrix& s, const NumericPolicy& policy = kDefaultPolicy);
Vector sym_eigvals(const Matrix& s, const NumericPolicy& policy = kDefaultPolicy);

/// Scaling and squaring with degree 3..13 Pade approximants.
Matrix expm(const Matrix& m);

/// LU with partial pivoting; verifies the backward-error bound on exit.
Vector solve(const Matrix& m, std::span<const double> b,
             const NumericPolicy& policy = kDefaultPolicy);

/// Particular solution of M v = b with v[pinned] fixed to `pinned_value`.
/// The remaining columns are solved in the least-squares sense on a
/// row-equilibrated copy, and the full system residual is verified.
Vector least_squares_particular(const Matrix& m, std::span<const double> b,
                                std::size_t pinned, double pinned_value = 0.0,
                                const NumericPolicy& policy = kDefaultPolicy);

struct EquilibratedInverse {
  Matrix inverse;
  /// Spectral condition number of the power-of-two equilibrated matrix.
  double scaled_condition = 0.0;
};

/// Inverse computed on D_r M D_c with power-of-two row/column scalings, which
/// keeps graded matrices (entries spanning many decades) accurate entrywise.
EquilibratedInverse inverse_equilibrated(const Matrix& m,
                                         const NumericPolicy& policy = kDefaultPolicy);
Matrix inverse(const Matrix& m, const NumericPolicy& policy = kDefaultPolicy);

/// Numerical rank by Gaussian elimination with complete pivoting.
int rank(const Matrix& m, double rel_tol);

/// Coefficients (1, c1, ..., cn) of det(sI - M) = s^n + c1 s^{n-1} + ... + cn,
/// by the Faddeev-LeVerrier recursion.
Vector characteristic_polynomial(const Matrix& m);

using VectorField = std::function<Vector(double, std::span<const double>)>;

Vector rk4_step(const VectorField& f, double t, std::span<const double> y, double h);

/// Classical fixed-step RK4 from t0 to t1; the final step is shortened to land
/// exactly on t1.
Vector rk4_integrate(const VectorField& f, std::span<const double> y0, double t0,
                     double t1, double h);

}  // namespace ctrl_dos
