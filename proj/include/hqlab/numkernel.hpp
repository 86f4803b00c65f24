#pragma once

// Dense least squares and the chi-square special functions.
//
// Everything here is a pure function of its arguments. Matrices are stored
// row-major; the QR solver copies the columns it needs into a column-major
// scratch buffer so that Householder sweeps run over contiguous memory.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hqlab/error.hpp"

namespace hqlab {

using Vec = std::vector<double>;

/// Dense row-major matrix with finite entries.
class Mat {
 public:
  Mat() = default;

  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
      throw Error(Errc::DimensionMismatch, "matrix entry count does not match rows*cols");
    }
    for (double v : entries_) {
      if (!std::isfinite(v)) throw Error(Errc::NonFinite, "matrix entry is not finite");
    }
  }

  static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> e;
    e.reserve(r * c);
    for (const auto& row : rows) {
      if (row.size() != c) throw Error(Errc::DimensionMismatch, "ragged row list");
      e.insert(e.end(), row.begin(), row.end());
    }
    return Mat(r, c, std::move(e));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return entries_[i * cols_ + j]; }

  std::span<const double> entries() const noexcept { return entries_; }

  Vec column(std::size_t j) const {
    Vec out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  Mat select_columns(std::span<const std::size_t> cols) const {
    Mat out(rows_, cols.size());
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t c = 0; c < cols.size(); ++c) out(i, c) = (*this)(i, cols[c]);
    }
    return out;
  }

  /// First `n` rows, all columns.
  Mat leading_rows(std::size_t n) const {
    n = std::min(n, rows_);
    Mat out;
    out.rows_ = n;
    out.cols_ = cols_;
    out.entries_.assign(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n * cols_));
    return out;
  }

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

struct LeastSquaresFit {
  Vec coeffs;
  double rss = 0.0;
};

/// Relative threshold on |R_jj| below which a design is declared rank deficient.
inline constexpr double kRankTolerance = 1e-10;

namespace detail {

// Householder QR of an n x q column-major matrix `a`, applied to `y` in place.
// On return the upper triangle of `a` holds R and `y` holds Q^T y.
inline LeastSquaresFit householder_solve(std::vector<double>& a, std::size_t n, std::size_t q, Vec& y) {
  double max_norm = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[j * n + i] * a[j * n + i];
    max_norm = std::max(max_norm, std::sqrt(s));
  }
  const double tol = kRankTolerance * max_norm;

  for (std::size_t j = 0; j < q; ++j) {
    double* col = a.data() + j * n;
    double norm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) norm2 += col[i] * col[i];
    const double norm = std::sqrt(norm2);
    if (!(norm > tol)) {
      throw Error(Errc::RankDeficient, "design columns are linearly dependent (column " + std::to_string(j + 1) + ")");
    }
    const double alpha = col[j] > 0.0 ? -norm : norm;
    // v = x - alpha e_1, stored in col[j..n); beta = 2 / (v^T v)
    col[j] -= alpha;
    const double vtv = norm2 - 2.0 * alpha * (col[j] + alpha) + alpha * alpha;
    const double beta = 2.0 / vtv;
    for (std::size_t k = j + 1; k < q; ++k) {
      double* other = a.data() + k * n;
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += col[i] * other[i];
      dot *= beta;
      for (std::size_t i = j; i < n; ++i) other[i] -= dot * col[i];
    }
    double dot = 0.0;
    for (std::size_t i = j; i < n; ++i) dot += col[i] * y[i];
    dot *= beta;
    for (std::size_t i = j; i < n; ++i) y[i] -= dot * col[i];
    col[j] = alpha;  // R_jj
  }

  LeastSquaresFit fit;
  fit.coeffs.assign(q, 0.0);
  for (std::size_t jj = q; jj-- > 0;) {
    double s = y[jj];
    for (std::size_t k = jj + 1; k < q; ++k) s -= a[k * n + jj] * fit.coeffs[k];
    fit.coeffs[jj] = s / a[jj * n + jj];
  }
  double rss = 0.0;
  for (std::size_t i = q; i < n; ++i) rss += y[i] * y[i];
  fit.rss = rss;
  return fit;
}

}  // namespace detail

/// Least squares on the columns `cols` of `x` (no copy of the full design).
inline LeastSquaresFit least_squares_columns(const Mat& x, std::span<const std::size_t> cols,
                                             std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t q = cols.size();
  if (y.size() != n) throw Error(Errc::DimensionMismatch, "response length does not match design rows");
  if (q > n) throw Error(Errc::DimensionMismatch, "more columns than rows");
  for (std::size_t c : cols) {
    if (c >= x.cols()) throw Error(Errc::DimensionMismatch, "column index out of range");
  }
  std::vector<double> a(n * q);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < q; ++c) a[c * n + i] = x(i, cols[c]);
  }
  Vec work(y.begin(), y.end());
  return detail::householder_solve(a, n, q, work);
}

/// Minimizer of ||y - X b||^2 and its residual sum of squares, via Householder QR.
inline LeastSquaresFit least_squares(const Mat& x, std::span<const double> y) {
  std::vector<std::size_t> all(x.cols());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return least_squares_columns(x, all, y);
}

/// S_p - S_q for nested designs (every column of `x_small` also appears in `x_big`).
inline double rss_difference(const Mat& x_small, const Mat& x_big, std::span<const double> y) {
  if (x_small.rows() != x_big.rows()) throw Error(Errc::DimensionMismatch, "designs have different row counts");
  for (std::size_t j = 0; j < x_small.cols(); ++j) {
    bool found = false;
    for (std::size_t k = 0; k < x_big.cols() && !found; ++k) {
      bool same = true;
      for (std::size_t i = 0; i < x_small.rows() && same; ++i) same = x_small(i, j) == x_big(i, k);
      found = same;
    }
    if (!found) throw Error(Errc::InvalidArgument, "small design is not nested in the big design");
  }
  const double s_small = least_squares(x_small, y).rss;
  const double s_big = least_squares(x_big, y).rss;
  return std::max(0.0, s_small - s_big);
}

// ---------------------------------------------------------------------------
// Special functions

/// ln Gamma(x) for x > 0 (Lanczos approximation, g = 671/128, 14 terms).
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw Error(Errc::DomainError, "log_gamma requires a finite x > 0");
  static constexpr std::array<double, 14> cof = {
      57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,     -0.491913816097620199,
      .339946499848118887e-4,  .465236289270485756e-4,  -.983744753048795646e-4, .158088703224912494e-3,
      -.210264441724104883e-3, .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
      -.261908384015814087e-4, .368991826595316234e-5};
  double y = x;
  double tmp = x + 5.24218750000000000;
  tmp = (x + 0.5) * std::log(tmp) - tmp;
  double ser = 0.999999999999997092;
  for (double c : cof) ser += c / ++y;
  return tmp + std::log(2.5066282746310005 * ser / x);
}

namespace detail {

// Regularized lower incomplete gamma P(a, x) by its power series; valid for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by modified Lentz continued fraction; x >= a + 1.
inline double gamma_q_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw Error(Errc::DomainError, "gamma_q requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_fraction(a, x);
}

/// Density of the chi-square distribution with `dof` degrees of freedom.
inline double chi2_pdf(int dof, double x) {
  if (dof < 1 || !(x >= 0.0)) throw Error(Errc::DomainError, "chi2_pdf requires dof >= 1 and x >= 0");
  const double half = 0.5 * dof;
  if (x == 0.0) {
    if (dof == 1) throw Error(Errc::DomainError, "chi2_pdf(1, 0) is unbounded");
    return dof == 2 ? 0.5 : 0.0;
  }
  return std::exp((half - 1.0) * std::log(x) - 0.5 * x - half * std::log(2.0) - log_gamma(half));
}

/// Upper tail P(chi2_dof >= t).
inline double chi2_survival(int dof, double t) {
  if (dof < 1 || !(t >= 0.0)) throw Error(Errc::DomainError, "chi2_survival requires dof >= 1 and t >= 0");
  return gamma_q(0.5 * dof, 0.5 * t);
}

}  // namespace hqlab
