#pragma once

// Regressor subset selection by L(z^n, pi) = n ln S(pi) + (|pi|/2) d_n.
//
// Subsets are sorted vectors of 0-based column indices. They are rendered
// 1-based ({1,2}) to match the x1..xm column names of the dataset format.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hqlab/error.hpp"
#include "hqlab/numkernel.hpp"
#include "hqlab/penalty.hpp"

namespace hqlab {

using Subset = std::vector<std::size_t>;

/// n samples of (y, x_1..x_m); no intercept column is implied.
class RegressionDataset {
 public:
  RegressionDataset(Mat design, Vec response) : design_(std::move(design)), response_(std::move(response)) {
    if (response_.empty()) throw Error(Errc::EmptyDataset, "empty dataset");
    if (design_.rows() != response_.size()) {
      throw Error(Errc::DimensionMismatch, "design rows and response length differ");
    }
    for (double v : response_) {
      if (!std::isfinite(v)) throw Error(Errc::NonFinite, "response entry is not finite");
    }
  }

  std::size_t n() const noexcept { return response_.size(); }
  std::size_t m() const noexcept { return design_.cols(); }
  const Mat& design() const noexcept { return design_; }
  const Vec& response() const noexcept { return response_; }

  /// The first `n` samples.
  RegressionDataset prefix(std::size_t n) const {
    n = std::min(n, this->n());
    return RegressionDataset(design_.leading_rows(n), Vec(response_.begin(), response_.begin() + static_cast<std::ptrdiff_t>(n)));
  }

  friend bool operator==(const RegressionDataset&, const RegressionDataset&) = default;

 private:
  Mat design_;
  Vec response_;
};

struct SubsetScore {
  Subset subset;
  std::size_t k = 0;
  double rss = 0.0;
  /// -infinity when the subset fits exactly (rss at rounding level).
  double criterion = 0.0;
};

struct SelectionResult {
  Subset chosen;
  std::vector<SubsetScore> scores;
  std::string penalty;
  double d_n = 0.0;
  std::size_t n = 0;
};

enum class SearchMode { Exhaustive, Nested };

inline constexpr std::size_t kMaxExhaustiveRegressors = 20;
inline constexpr double kLogFloor = 1e-300;
/// An RSS below this fraction of the largest candidate RSS is rounding noise
/// around an exact fit (relative residual norm 1e-13).
inline constexpr double kExactFitRelative = 1e-26;

inline std::string format_subset(const Subset& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i] + 1);
  }
  return out + "}";
}

/// Residual sum of squares of y regressed on the columns in `subset`.
inline double rss_subset(const RegressionDataset& ds, const Subset& subset) {
  return least_squares_columns(ds.design(), subset, ds.response()).rss;
}

/// n ln(rss) + (k/2) d_n.
inline double criterion_lr(double n, double rss, std::size_t k, double d_n) {
  if (!(rss > kLogFloor)) throw Error(Errc::DegenerateFit, "residual sum of squares is zero; log undefined");
  return n * std::log(rss) + 0.5 * static_cast<double>(k) * d_n;
}

inline std::vector<Subset> candidate_subsets(std::size_t m, SearchMode mode) {
  std::vector<Subset> out;
  if (mode == SearchMode::Nested) {
    for (std::size_t k = 0; k <= m; ++k) {
      Subset s(k);
      for (std::size_t j = 0; j < k; ++j) s[j] = j;
      out.push_back(std::move(s));
    }
    return out;
  }
  if (m > kMaxExhaustiveRegressors) {
    throw Error(Errc::TooManyRegressors, "exhaustive search is capped at " + std::to_string(kMaxExhaustiveRegressors) + " regressors");
  }
  const std::uint64_t count = std::uint64_t{1} << m;
  out.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    Subset s;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask >> j & 1u) s.push_back(j);
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// RSS of every candidate; criteria are left at zero.
inline std::vector<SubsetScore> score_candidates(const RegressionDataset& ds, SearchMode mode) {
  std::vector<SubsetScore> scores;
  for (auto& s : candidate_subsets(ds.m(), mode)) {
    SubsetScore sc;
    sc.k = s.size();
    sc.rss = rss_subset(ds, s);
    sc.subset = std::move(s);
    scores.push_back(std::move(sc));
  }
  return scores;
}

/// True when `a` ranks strictly before `b`: lower criterion, then smaller k,
/// then lexicographically smaller subset.
inline bool ranks_before(const SubsetScore& a, const SubsetScore& b) {
  if (a.criterion != b.criterion) return a.criterion < b.criterion;
  if (a.k != b.k) return a.k < b.k;
  return a.subset < b.subset;
}

/// Fills in criteria for precomputed RSS values and picks the argmin.
inline SelectionResult rank_scores(std::vector<SubsetScore> scores, std::size_t n, const PenaltySequence& pen) {
  if (scores.empty()) throw Error(Errc::InvalidArgument, "no candidates to rank");
  SelectionResult result;
  result.n = n;
  result.penalty = pen.label();
  result.d_n = pen.evaluate(static_cast<double>(n));
  double scale = 0.0;
  for (const auto& sc : scores) scale = std::max(scale, sc.rss);
  const double floor = std::max(kLogFloor, kExactFitRelative * scale);
  for (auto& sc : scores) {
    sc.criterion = sc.rss > floor ? criterion_lr(static_cast<double>(n), sc.rss, sc.k, result.d_n)
                                      : -std::numeric_limits<double>::infinity();
  }
  const auto best = std::min_element(scores.begin(), scores.end(), ranks_before);
  result.chosen = best->subset;
  result.scores = std::move(scores);
  return result;
}

inline SelectionResult select_subset(const RegressionDataset& ds, const PenaltySequence& pen,
                                     SearchMode mode = SearchMode::Exhaustive) {
  return rank_scores(score_candidates(ds, mode), ds.n(), pen);
}

/// (S_small - S_big) / (S_small / n) for nested subsets small of big.
inline double delta_rss_statistic(const RegressionDataset& ds, const Subset& small, const Subset& big) {
  if (!std::includes(big.begin(), big.end(), small.begin(), small.end())) {
    throw Error(Errc::InvalidArgument, "small subset is not contained in big subset");
  }
  if (small == big) return 0.0;
  const double s_small = rss_subset(ds, small);
  if (!(s_small > 0.0)) throw Error(Errc::DegenerateFit, "S(small) is zero");
  const double s_big = rss_subset(ds, big);
  return static_cast<double>(ds.n()) * (s_small - s_big) / s_small;
}

// ---------------------------------------------------------------------------
// CSV: header "y,x1,...,xm", then one numeric row per sample.

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ls(line);
  while (std::getline(ls, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_csv_number(const std::string& raw, std::size_t line_no) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  double v = 0.0;
  bool ok = !s.empty();
  if (ok) {
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      ok = false;
    }
  }
  if (!ok || used != s.size() || !std::isfinite(v)) {
    throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": invalid number '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline RegressionDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::EmptyDataset, "empty dataset");
  const auto header = detail::split_csv_line(line);
  if (header.empty() || detail::trim(header[0]) != "y") throw Error(Errc::ParseError, "header must start with column 'y'");
  const std::size_t m = header.size() - 1;
  for (std::size_t j = 1; j <= m; ++j) {
    if (detail::trim(header[j]) != "x" + std::to_string(j)) {
      throw Error(Errc::ParseError, "header column " + std::to_string(j + 1) + " must be 'x" + std::to_string(j) + "'");
    }
  }
  Vec y;
  std::vector<double> x;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != m + 1) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(m + 1) + " fields");
    }
    y.push_back(detail::parse_csv_number(fields[0], line_no));
    for (std::size_t j = 1; j <= m; ++j) x.push_back(detail::parse_csv_number(fields[j], line_no));
  }
  if (y.empty()) throw Error(Errc::EmptyDataset, "empty dataset");
  const std::size_t n = y.size();
  return RegressionDataset(Mat(n, m, std::move(x)), std::move(y));
}

inline void write_dataset_csv(std::ostream& out, const RegressionDataset& ds) {
  out << 'y';
  for (std::size_t j = 1; j <= ds.m(); ++j) out << ",x" << j;
  out << '\n';
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out << ds.response()[i];
    for (std::size_t j = 0; j < ds.m(); ++j) out << ',' << ds.design()(i, j);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace hqlab
