#pragma once

// Closed-form overestimation quantities for nested linear-regression models.
//
// For a true subset of size p and a superset of size q = p + dk, the larger
// model wins exactly when (S_p - S_q) / (S_p / n) exceeds
// n (1 - exp(-dk d_n / (2n))); asymptotically that statistic is chi-square
// with dk degrees of freedom.

#include <cmath>
#include <cstddef>
#include <utility>

#include "hqlab/error.hpp"
#include "hqlab/numkernel.hpp"

namespace hqlab {

struct OverestimationQuery {
  double n = 1.0;
  int dk = 1;
  double d_n = 0.0;
};

namespace detail {
inline void check(const OverestimationQuery& q) {
  if (!(q.n >= 1.0) || q.dk < 1 || !(q.d_n >= 0.0)) {
    throw Error(Errc::DomainError, "overestimation query needs n >= 1, dk >= 1, d_n >= 0");
  }
}
}  // namespace detail

/// n (1 - exp(-dk d_n / (2n))).
inline double threshold(const OverestimationQuery& q) {
  detail::check(q);
  return -q.n * std::expm1(-static_cast<double>(q.dk) * q.d_n / (2.0 * q.n));
}

/// Asymptotic probability that the superset beats the true subset.
inline double overestimation_probability(const OverestimationQuery& q) {
  return chi2_survival(q.dk, threshold(q));
}

struct ThresholdBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// (dk d_n)/2 - (dk d_n)^2/(4n) <= threshold <= (dk d_n)/2.
inline ThresholdBounds threshold_bounds(const OverestimationQuery& q) {
  detail::check(q);
  const double x = static_cast<double>(q.dk) * q.d_n;
  return {0.5 * x - x * x / (4.0 * q.n), 0.5 * x};
}

/// dk ln ln n: the iterated-logarithm envelope for (S_p - S_q) / (S_p / n).
inline double lil_band(double n, int dk) {
  if (!(n >= 3.0) || dk < 1) throw Error(Errc::DomainError, "lil_band needs n >= 3 and dk >= 1");
  return static_cast<double>(dk) * std::log(std::log(n));
}

/// n lambda_kk^2 / (2 ln ln n): the autoregressive reflection coefficient scaled
/// by its iterated-logarithm envelope; stays near or below 1 beyond the true order.
inline double ar_lil_ratio(double n, double reflection) {
  if (!(n >= 3.0)) throw Error(Errc::DomainError, "ar_lil_ratio needs n >= 3");
  return n * reflection * reflection / (2.0 * std::log(std::log(n)));
}

}  // namespace hqlab
