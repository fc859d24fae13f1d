#include "ctrl_dos/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "ctrl_dos/error.hpp"

namespace ctrl_dos {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool ok, ErrorCode code, const char* msg) {
  if (!ok) throw Error(code, msg);
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::InvalidInput,
          "matrix dimension mismatch");
}

double pow2_scale(double magnitude) {
  if (magnitude == 0.0 || !std::isfinite(magnitude)) return 1.0;
  int e = 0;
  std::frexp(magnitude, &e);
  return std::ldexp(1.0, -e);
}

// LU factorization with partial pivoting, stored in place.
struct Lu {
  Matrix lu;
  std::vector<std::size_t> perm;
  bool singular = false;

  explicit Lu(const Matrix& m) : lu(m), perm(m.rows()) {
    const std::size_t n = m.rows();
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    const double scale = m.max_abs();
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
        std::swap(perm[k], perm[p]);
      }
      const double pivot = lu(k, k);
      if (pivot == 0.0 || std::abs(pivot) <= static_cast<double>(n) * kEps * scale * 1e-3) {
        singular = true;
        return;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = lu(i, k) / pivot;
        lu(i, k) = f;
        for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      }
    }
  }

  Vector apply(std::span<const double> b) const {
    const std::size_t n = lu.rows();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[perm[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
      x[i] = s / lu(i, i);
    }
    return x;
  }
};

double backward_error_bound(const Matrix& m, std::span<const double> v,
                            std::span<const double> b, double tol) {
  return tol * (spectral_norm(m) * norm2(v) + norm2(b));
}

Error rank_error(const char* what, double residual) {
  std::ostringstream os;
  os << what << " (residual " << residual << ")";
  Error e(ErrorCode::RankDeficiency, os.str());
  e.residual = residual;
  return e;
}

}  // namespace

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorCode::InvalidInput, "ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_row_major(std::size_t rows, std::size_t cols,
                              std::span<const double> entries) {
  require(entries.size() == rows * cols, ErrorCode::InvalidInput,
          "entry count does not match rows*cols");
  Matrix m(rows, cols);
  std::copy(entries.begin(), entries.end(), m.data_.begin());
  return m;
}

Matrix Matrix::column(std::span<const double> v) {
  return from_row_major(v.size(), 1, v);
}

Matrix Matrix::row(std::span<const double> v) { return from_row_major(1, v.size(), v); }

Vector Matrix::col(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_col(std::size_t j, std::span<const double> v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::norm1() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same_shape(*this, o);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same_shape(*this, o);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::InvalidInput, "matrix product dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), ErrorCode::InvalidInput, "matrix-vector dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double norm2(std::span<const double> v) {
  // Scaled to avoid overflow for the graded vectors of large-lambda chains.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double x : v) s += (x / scale) * (x / scale);
  return scale * std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  Vector r(y.begin(), y.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += alpha * x[i];
  return r;
}

// ------------------------------------------------------- eigen / norms

SymmetricEigen sym_eigen(const Matrix& s, const NumericPolicy& policy) {
  require(s.square(), ErrorCode::InvalidInput, "sym_eigen: matrix must be square");
  require(s.all_finite(), ErrorCode::InvalidInput, "sym_eigen: non-finite entry");
  const std::size_t n = s.rows();
  const double scale = s.max_abs();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(s(i, j) - s(j, i)) > policy.symmetry_tol * scale)
        throw Error(ErrorCode::InvalidInput, "sym_eigen: matrix is not symmetric");

  Matrix a = s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (s(i, j) + s(j, i));
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < policy.jacobi_max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        // Relative off-diagonal test keeps small eigenvalues of graded
        // positive definite matrices accurate.
        if (apq == 0.0 ||
            std::abs(apq) <= kEps * std::sqrt(std::abs(a(p, p)) * std::abs(a(q, q))))
          continue;
        rotated = true;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

Vector sym_eigvals(const Matrix& s, const NumericPolicy& policy) {
  return sym_eigen(s, policy).values;
}

double spectral_norm(const Matrix& m) {
  require(m.all_finite(), ErrorCode::InvalidInput, "spectral_norm: non-finite entry");
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  // Pre-scale by a power of two so M^T M cannot overflow.
  const double scale = pow2_scale(m.max_abs());
  if (m.max_abs() == 0.0) return 0.0;
  const Matrix ms = m * scale;
  const Vector ev = sym_eigvals(ms.transpose() * ms);
  return std::sqrt(std::max(0.0, ev.back())) / scale;
}

// ---------------------------------------------------------------- expm

namespace {

template <std::size_t N>
void pade_odd_even(const Matrix& a, const std::array<double, N>& b,
                   Matrix& u, Matrix& v) {
  // Degrees 3..9: U = A * sum_{odd k} b_k A^{k-1}, V = sum_{even k} b_k A^k.
  const std::size_t n = a.rows();
  const Matrix a2 = a * a;
  Matrix power = Matrix::identity(n);
  Matrix uo(n, n), ve(n, n);
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    ve += power * b[k];
    uo += power * b[k + 1];
    power = power * a2;
  }
  u = a * uo;
  v = ve;
}

}  // namespace

Matrix expm(const Matrix& m) {
  require(m.square(), ErrorCode::InvalidInput, "expm: matrix must be square");
  require(m.all_finite(), ErrorCode::InvalidInput, "expm: non-finite entry");
  const std::size_t n = m.rows();
  const Matrix id = Matrix::identity(n);
  const double norm = m.norm1();
  if (norm == 0.0) return id;

  static constexpr std::array<double, 4> b3{120., 60., 12., 1.};
  static constexpr std::array<double, 6> b5{30240., 15120., 3360., 420., 30., 1.};
  static constexpr std::array<double, 8> b7{17297280., 8648640., 1995840., 277200.,
                                            25200.,    1512.,    56.,      1.};
  static constexpr std::array<double, 10> b9{17643225600., 8821612800., 2075673600.,
                                             302702400.,   30270240.,   2162160.,
                                             110880.,      3960.,       90.,
                                             1.};
  static constexpr std::array<double, 14> b13{
      64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
      129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
      1323241920.,        40840800.,          960960.,           16380.,
      182.,               1.};

  Matrix u, v;
  int squarings = 0;
  if (norm <= 1.495585217958292e-2) {
    pade_odd_even(m, b3, u, v);
  } else if (norm <= 2.539398330063230e-1) {
    pade_odd_even(m, b5, u, v);
  } else if (norm <= 9.504178996162932e-1) {
    pade_odd_even(m, b7, u, v);
  } else if (norm <= 2.097847961257068) {
    pade_odd_even(m, b9, u, v);
  } else {
    constexpr double theta13 = 5.371920351148152;
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    const Matrix a = m * std::ldexp(1.0, -squarings);
    const Matrix a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
    const auto& b = b13;
    u = a * (a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]) + a6 * b[7] + a4 * b[5] +
             a2 * b[3] + id * b[1]);
    v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] + a2 * b[2] +
        id * b[0];
  }

  const Matrix p = v + u;
  const Lu lu(v - u);
  if (lu.singular) throw Error(ErrorCode::NumericalFailure, "expm: singular Pade denominator");
  Matrix r(n, n);
  for (std::size_t j = 0; j < n; ++j) r.set_col(j, lu.apply(p.col(j)));
  for (int k = 0; k < squarings; ++k) {
    r = r * r;
    if (!r.all_finite()) throw Error(ErrorCode::NumericalFailure, "expm: overflow");
  }
  if (!r.all_finite()) throw Error(ErrorCode::NumericalFailure, "expm: overflow");
  return r;
}

// ------------------------------------------------------------- solvers

Vector solve(const Matrix& m, std::span<const double> b, const NumericPolicy& policy) {
  require(m.square() && m.rows() == b.size(), ErrorCode::InvalidInput,
          "solve: dimension mismatch");
  require(m.all_finite(), ErrorCode::InvalidInput, "solve: non-finite entry");
  const Lu lu(m);
  if (lu.singular) throw rank_error("solve: singular matrix", norm2(b));
  Vector x = lu.apply(b);
  const double res = norm2(axpy(-1.0, b, m * x));
  if (!(res <= backward_error_bound(m, x, b, policy.residual_tol)))
    throw rank_error("solve: residual check failed", res);
  return x;
}

Vector least_squares_particular(const Matrix& m, std::span<const double> b,
                                std::size_t pinned, double pinned_value,
                                const NumericPolicy& policy) {
  const std::size_t rows = m.rows(), cols = m.cols();
  require(rows == b.size() && pinned < cols && cols >= 1 && rows + 1 >= cols,
          ErrorCode::InvalidInput, "least_squares_particular: dimension mismatch");
  require(m.all_finite(), ErrorCode::InvalidInput,
          "least_squares_particular: non-finite entry");

  Vector v(cols, 0.0);
  v[pinned] = pinned_value;
  const std::size_t k = cols - 1;

  if (k > 0) {
    // Reduced system on the free columns, row-equilibrated by powers of two.
    Matrix r(rows, k);
    Vector rhs(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      std::size_t c = 0;
      for (std::size_t j = 0; j < cols; ++j)
        if (j != pinned) r(i, c++) = m(i, j);
      rhs[i] = b[i] - m(i, pinned) * pinned_value;
      double row_max = 0.0;
      for (std::size_t j = 0; j < k; ++j) row_max = std::max(row_max, std::abs(r(i, j)));
      const double s = pow2_scale(row_max);
      for (std::size_t j = 0; j < k; ++j) r(i, j) *= s;
      rhs[i] *= s;
    }

    // Householder QR.
    const double rscale = r.max_abs();
    for (std::size_t j = 0; j < k; ++j) {
      double alpha = 0.0;
      {
        Vector colj(rows - j);
        for (std::size_t i = j; i < rows; ++i) colj[i - j] = r(i, j);
        alpha = norm2(colj);
      }
      if (alpha <= policy.rank_tol * 1e-3 * rscale)
        throw rank_error("least_squares_particular: rank-deficient reduced system",
                         norm2(b));
      if (r(j, j) > 0) alpha = -alpha;
      Vector w(rows - j);
      for (std::size_t i = j; i < rows; ++i) w[i - j] = r(i, j);
      w[0] -= alpha;
      const double wn2 = dot(w, w);
      if (wn2 > 0.0) {
        for (std::size_t c = j; c < k; ++c) {
          double s = 0.0;
          for (std::size_t i = j; i < rows; ++i) s += w[i - j] * r(i, c);
          s = 2.0 * s / wn2;
          for (std::size_t i = j; i < rows; ++i) r(i, c) -= s * w[i - j];
        }
        double s = 0.0;
        for (std::size_t i = j; i < rows; ++i) s += w[i - j] * rhs[i];
        s = 2.0 * s / wn2;
        for (std::size_t i = j; i < rows; ++i) rhs[i] -= s * w[i - j];
      }
    }
    Vector x(k);
    for (std::size_t j = k; j-- > 0;) {
      double s = rhs[j];
      for (std::size_t c = j + 1; c < k; ++c) s -= r(j, c) * x[c];
      x[j] = s / r(j, j);
    }
    std::size_t c = 0;
    for (std::size_t j = 0; j < cols; ++j)
      if (j != pinned) v[j] = x[c++];
  }

  const double res = norm2(axpy(-1.0, b, m * v));
  if (!std::isfinite(res) || !(res <= backward_error_bound(m, v, b, policy.residual_tol)))
    throw rank_error("least_squares_particular: system inconsistent after pinning", res);
  return v;
}

EquilibratedInverse inverse_equilibrated(const Matrix& m, const NumericPolicy& policy) {
  require(m.square(), ErrorCode::InvalidInput, "inverse: matrix must be square");
  require(m.all_finite(), ErrorCode::InvalidInput, "inverse: non-finite entry");
  const std::size_t n = m.rows();
  Vector rs(n), cs(n);
  Matrix s = m;
  for (std::size_t i = 0; i < n; ++i) {
    double mx = 0.0;
    for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, std::abs(s(i, j)));
    rs[i] = pow2_scale(mx);
    for (std::size_t j = 0; j < n; ++j) s(i, j) *= rs[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, std::abs(s(i, j)));
    cs[j] = pow2_scale(mx);
    for (std::size_t i = 0; i < n; ++i) s(i, j) *= cs[j];
  }
  const Lu lu(s);
  if (lu.singular) throw rank_error("inverse: singular matrix", 0.0);
  Matrix sinv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    sinv.set_col(j, lu.apply(e));
  }
  if (!sinv.all_finite()) throw Error(ErrorCode::NumericalFailure, "inverse: overflow");
  // M^{-1} = D_c S^{-1} D_r
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = cs[i] * sinv(i, j) * rs[j];
  (void)policy;
  return {inv, spectral_norm(s) * spectral_norm(sinv)};
}

Matrix inverse(const Matrix& m, const NumericPolicy& policy) {
  return inverse_equilibrated(m, policy).inverse;
}

int rank(const Matrix& m, double rel_tol) {
  Matrix a = m;
  const std::size_t rows = a.rows(), cols = a.cols();
  const double threshold = rel_tol * a.max_abs();
  if (a.max_abs() == 0.0) return 0;
  int r = 0;
  for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
    std::size_t pi = k, pj = k;
    double best = 0.0;
    for (std::size_t i = k; i < rows; ++i)
      for (std::size_t j = k; j < cols; ++j)
        if (std::abs(a(i, j)) > best) {
          best = std::abs(a(i, j));
          pi = i;
          pj = j;
        }
    if (best <= threshold) break;
    for (std::size_t j = 0; j < cols; ++j) std::swap(a(k, j), a(pi, j));
    for (std::size_t i = 0; i < rows; ++i) std::swap(a(i, k), a(i, pj));
    for (std::size_t i = k + 1; i < rows; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < cols; ++j) a(i, j) -= f * a(k, j);
    }
    ++r;
  }
  return r;
}

Vector characteristic_polynomial(const Matrix& m) {
  require(m.square(), ErrorCode::InvalidInput, "characteristic_polynomial: not square");
  const std::size_t n = m.rows();
  const Matrix id = Matrix::identity(n);
  Vector c(n + 1, 0.0);
  c[0] = 1.0;
  Matrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = m * mk + id * c[k - 1];
    const Matrix amk = m * mk;
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += amk(i, i);
    c[k] = -tr / static_cast<double>(k);
  }
  return c;
}

// ------------------------------------------------------------------ RK4

Vector rk4_step(const VectorField& f, double t, std::span<const double> y, double h) {
  const Vector k1 = f(t, y);
  const Vector k2 = f(t + 0.5 * h, axpy(0.5 * h, k1, y));
  const Vector k3 = f(t + 0.5 * h, axpy(0.5 * h, k2, y));
  const Vector k4 = f(t + h, axpy(h, k3, y));
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Vector rk4_integrate(const VectorField& f, std::span<const double> y0, double t0,
                     double t1, double h) {
  require(h > 0.0 && std::isfinite(h), ErrorCode::InvalidParameter, "rk4: step must be > 0");
  require(t1 >= t0, ErrorCode::InvalidParameter, "rk4: t1 must be >= t0");
  Vector y(y0.begin(), y0.end());
  const auto steps = static_cast<long long>(std::floor((t1 - t0) / h));
  double t = t0;
  for (long long i = 0; i < steps; ++i) {
    y = rk4_step(f, t, y, h);
    t = t0 + static_cast<double>(i + 1) * h;
    for (double v : y)
      if (!std::isfinite(v)) throw Error(ErrorCode::NumericalFailure, "rk4: non-finite state");
  }
  const double rest = t1 - t;
  if (rest > 0.0) {
    y = rk4_step(f, t, y, rest);
    for (double v : y)
      if (!std::isfinite(v)) throw Error(ErrorCode::NumericalFailure, "rk4: non-finite state");
  }
  return y;
}

}  // namespace ctrl_dos
