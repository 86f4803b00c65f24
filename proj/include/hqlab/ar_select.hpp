#pragma once

// Autoregressive order estimation from sample autocovariances.
//
// Coefficients follow the model X_i = sum_j lambda_j X_{i-j} + W_i. The
// production path is the Durbin-Levinson recursion; yule_walker_direct solves
// the (k+1)x(k+1) augmented system and serves as its oracle.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hqlab/error.hpp"
#include "hqlab/numkernel.hpp"
#include "hqlab/penalty.hpp"

namespace hqlab {

class ARSeries {
 public:
  explicit ARSeries(Vec samples) : samples_(std::move(samples)) {
    if (samples_.size() < 2) throw Error(Errc::EmptyDataset, "series needs at least two samples");
    for (double v : samples_) {
      if (!std::isfinite(v)) throw Error(Errc::NonFinite, "series entry is not finite");
    }
  }

  std::size_t n() const noexcept { return samples_.size(); }
  const Vec& samples() const noexcept { return samples_; }

  ARSeries prefix(std::size_t n) const {
    return ARSeries(Vec(samples_.begin(), samples_.begin() + static_cast<std::ptrdiff_t>(std::min(n, samples_.size()))));
  }

  friend bool operator==(const ARSeries&, const ARSeries&) = default;

 private:
  Vec samples_;
};

inline constexpr double kVarianceFloor = 1e-300;

struct AutocovarianceTable {
  Vec gammas;  // lags 0..K
  double mean = 0.0;
  std::size_t n = 0;

  std::size_t max_lag() const noexcept { return gammas.empty() ? 0 : gammas.size() - 1; }
  double at(long lag) const { return gammas.at(static_cast<std::size_t>(lag < 0 ? -lag : lag)); }
};

struct YuleWalkerSolution {
  std::size_t order = 0;
  Vec coeffs;  // lambda_{1,k} .. lambda_{k,k}
  double sigma2 = 0.0;

  /// lambda_{k,k}; zero at order 0.
  double reflection() const noexcept { return coeffs.empty() ? 0.0 : coeffs.back(); }
};

/// Biased (divide-by-n), mean-corrected sample autocovariances up to `max_lag`.
inline AutocovarianceTable autocovariance(const ARSeries& series, std::size_t max_lag) {
  const auto& x = series.samples();
  const std::size_t n = x.size();
  if (max_lag >= n) throw Error(Errc::LagTooLarge, "max lag must be below the series length");
  AutocovarianceTable t;
  t.n = n;
  double sum = 0.0;
  for (double v : x) sum += v;
  t.mean = sum / static_cast<double>(n);
  Vec centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - t.mean;
  t.gammas.assign(max_lag + 1, 0.0);
  for (std::size_t m = 0; m <= max_lag; ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i + m < n; ++i) s += centered[i] * centered[i + m];
    t.gammas[m] = s / static_cast<double>(n);
  }
  return t;
}

/// Builds the augmented system exactly as displayed: unknowns (sigma2, -lambda_1..-lambda_k).
/// Row 0 is [-1, g1..gk], row i >= 1 is [0, g_{i-1} .. g_{i-k}], right-hand side -g_i.
inline Mat yule_walker_system(const AutocovarianceTable& table, std::size_t k, Vec& rhs) {
  if (k > table.max_lag()) throw Error(Errc::LagTooLarge, "order exceeds the autocovariance table");
  Mat a(k + 1, k + 1);
  rhs.assign(k + 1, 0.0);
  a(0, 0) = -1.0;
  for (std::size_t j = 1; j <= k; ++j) a(0, j) = table.at(static_cast<long>(j));
  for (std::size_t i = 1; i <= k; ++i) {
    for (std::size_t j = 1; j <= k; ++j) a(i, j) = table.at(static_cast<long>(i) - static_cast<long>(j));
  }
  for (std::size_t i = 0; i <= k; ++i) rhs[i] = -table.at(static_cast<long>(i));
  return a;
}

/// Solves the displayed Yule-Walker system at order k by Gaussian elimination
/// with partial pivoting.
inline YuleWalkerSolution yule_walker_direct(const AutocovarianceTable& table, std::size_t k) {
  Vec b;
  Mat a = yule_walker_system(table, k, b);
  const std::size_t dim = k + 1;
  double scale = 0.0;
  for (double v : a.entries()) scale = std::max(scale, std::abs(v));
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < dim; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    if (!(std::abs(a(piv, col)) > 1e-14 * scale)) throw Error(Errc::SingularSystem, "Yule-Walker system is singular");
    if (piv != col) {
      for (std::size_t j = 0; j < dim; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < dim; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < dim; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec sol(dim);
  for (std::size_t i = dim; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < dim; ++j) s -= a(i, j) * sol[j];
    sol[i] = s / a(i, i);
  }
  YuleWalkerSolution out;
  out.order = k;
  out.sigma2 = sol[0];
  out.coeffs.resize(k);
  for (std::size_t j = 0; j < k; ++j) out.coeffs[j] = -sol[j + 1];
  return out;
}

namespace detail {

// Runs the recursion up to k_max, stopping before the first level whose
// variance is not positive. Returns that failing level (or k_max + 1).
inline std::size_t levinson_run(const AutocovarianceTable& table, std::size_t k_max,
                                std::vector<YuleWalkerSolution>& levels) {
  levels.clear();
  const double g0 = table.gammas.at(0);
  if (!(g0 > 0.0)) return 0;
  levels.push_back({0, {}, g0});
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto& prev = levels.back();
    double num = table.at(static_cast<long>(k));
    for (std::size_t j = 1; j < k; ++j) num -= prev.coeffs[j - 1] * table.at(static_cast<long>(k - j));
    const double kappa = num / prev.sigma2;
    YuleWalkerSolution next;
    next.order = k;
    next.coeffs.resize(k);
    for (std::size_t j = 1; j < k; ++j) next.coeffs[j - 1] = prev.coeffs[j - 1] - kappa * prev.coeffs[k - j - 1];
    next.coeffs[k - 1] = kappa;
    next.sigma2 = (1.0 - kappa * kappa) * prev.sigma2;
    if (!(next.sigma2 > 0.0)) return k;
#ifndef NDEBUG
    // sigma2_k must also equal gamma_0 - sum_j lambda_{j,k} gamma_j
    double direct = table.gammas[0];
    for (std::size_t j = 1; j <= k; ++j) direct -= next.coeffs[j - 1] * table.at(static_cast<long>(j));
    assert(std::abs(direct - next.sigma2) <= 1e-8 * table.gammas[0]);
#endif
    levels.push_back(std::move(next));
  }
  return k_max + 1;
}

}  // namespace detail

/// Durbin-Levinson solutions for orders 0..k_max.
inline std::vector<YuleWalkerSolution> levinson(const AutocovarianceTable& table, std::size_t k_max) {
  if (k_max > table.max_lag()) throw Error(Errc::LagTooLarge, "order exceeds the autocovariance table");
  std::vector<YuleWalkerSolution> levels;
  const std::size_t failed = detail::levinson_run(table, k_max, levels);
  if (failed <= k_max) {
    throw Error(Errc::NonpositiveVariance, "innovation variance is not positive at order " + std::to_string(failed));
  }
  return levels;
}

/// (n/2) ln(sigma2) + (k/2) d_n.
inline double criterion_ar(double n, double sigma2, std::size_t k, double d_n) {
  if (!(sigma2 > kVarianceFloor)) throw Error(Errc::DegenerateVariance, "innovation variance is zero; log undefined");
  return 0.5 * n * std::log(sigma2) + 0.5 * static_cast<double>(k) * d_n;
}

struct OrderScore {
  std::size_t k = 0;
  double sigma2 = 0.0;
  double reflection = 0.0;
  double criterion = 0.0;
};

struct OrderSelection {
  std::size_t chosen = 0;
  std::vector<OrderScore> scores;
  std::string penalty;
  double d_n = 0.0;
  std::size_t n = 0;
};

/// Picks the order in 0..k_max minimizing the criterion; ties go to the smaller order.
/// Orders at or beyond a level with nonpositive variance are dropped.
inline OrderSelection select_ar_order(const ARSeries& series, const PenaltySequence& pen, std::size_t k_max) {
  const std::size_t n = series.n();
  if (2 * k_max >= n) throw Error(Errc::InvalidArgument, "k_max must be below n/2");
  const auto table = autocovariance(series, k_max);
  double max_abs = 0.0;
  for (double v : series.samples()) max_abs = std::max(max_abs, std::abs(v));
  const double floor = 1e-12 * max_abs;
  if (!(table.gammas[0] > floor * floor) || !(table.gammas[0] > kVarianceFloor)) {
    throw Error(Errc::ZeroVariance, "zero variance");
  }
  std::vector<YuleWalkerSolution> levels;
  detail::levinson_run(table, k_max, levels);

  OrderSelection out;
  out.n = n;
  out.penalty = pen.label();
  out.d_n = pen.evaluate(static_cast<double>(n));
  for (const auto& lvl : levels) {
    if (!(lvl.sigma2 > kVarianceFloor)) break;
    out.scores.push_back({lvl.order, lvl.sigma2, lvl.reflection(),
                          criterion_ar(static_cast<double>(n), lvl.sigma2, lvl.order, out.d_n)});
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i].criterion < out.scores[best].criterion) best = i;
  }
  out.chosen = out.scores[best].k;
  return out;
}

/// True when 1 - sum_j lambda_j z^j has no roots in the closed unit disc,
/// tested by stepping the coefficients down to reflection coefficients.
inline bool is_stationary(std::span<const double> coeffs) {
  Vec a(coeffs.begin(), coeffs.end());
  for (std::size_t k = a.size(); k > 0; --k) {
    const double kappa = a[k - 1];
    if (!(std::abs(kappa) < 1.0)) return false;
    const double denom = 1.0 - kappa * kappa;
    Vec lower(k - 1);
    for (std::size_t j = 1; j < k; ++j) lower[j - 1] = (a[j - 1] + kappa * a[k - j - 1]) / denom;
    a = std::move(lower);
  }
  return true;
}

/// One real per line; blank lines are skipped.
inline ARSeries read_series(std::istream& in) {
  Vec x;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string s = line.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    bool ok = true;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok || used != s.size() || !std::isfinite(v)) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": invalid number '" + s + "'");
    }
    x.push_back(v);
  }
  if (x.empty()) throw Error(Errc::EmptyDataset, "empty series");
  return ARSeries(std::move(x));
}

}  // namespace hqlab
