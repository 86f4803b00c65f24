#pragma once

// Penalty sequences n -> d_n and the generic criterion H + (k/2) d_n.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include "hqlab/error.hpp"

namespace hqlab {

namespace detail {

inline std::string format_number(double v) {
  // shortest form that round-trips, so labels read "hq:1.5"
  for (int p = 1; p < 17; ++p) {
    std::ostringstream s;
    s.precision(p);
    s << v;
    if (std::stod(s.str()) == v) return s.str();
  }
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

inline double parse_real(std::string_view text, std::string_view what) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(Errc::InvalidPenalty, "cannot parse " + std::string(what) + " from '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw Error(Errc::InvalidPenalty, "cannot parse " + std::string(what) + " from '" + s + "'");
  }
  return v;
}

}  // namespace detail

class PenaltySequence {
 public:
  struct Constant {
    double value;
  };
  struct LogN {};
  struct HannanQuinn {
    double c;
  };
  struct Custom {
    std::shared_ptr<const std::map<std::uint64_t, double>> table;
  };
  using Kind = std::variant<Constant, LogN, HannanQuinn, Custom>;

  static PenaltySequence constant(double a, std::string label = {}) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw Error(Errc::InvalidPenalty, "constant penalty must be finite and >= 0");
    return {Constant{a}, label.empty() ? "const:" + detail::format_number(a) : std::move(label)};
  }
  static PenaltySequence aic() { return constant(2.0, "aic"); }
  static PenaltySequence bic() { return {LogN{}, "bic"}; }
  /// d_n = 2c ln ln n. Any c > 0 is accepted; consistency needs c > 1.
  static PenaltySequence hannan_quinn(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(Errc::InvalidPenalty, "Hannan-Quinn constant must be > 0");
    return {HannanQuinn{c}, "hq:" + detail::format_number(c)};
  }
  /// Tabulated d_n. Entries must be >= 0, and d_n / n at the largest tabulated n
  /// must be below 1 and below the ratio at the smallest n (a decaying d_n / n).
  static PenaltySequence custom(std::map<std::uint64_t, double> table, std::string label = "custom") {
    if (table.empty()) throw Error(Errc::InvalidPenalty, "custom penalty table is empty");
    for (const auto& [n, d] : table) {
      if (n < 1 || !(d >= 0.0) || !std::isfinite(d)) {
        throw Error(Errc::InvalidPenalty, "custom penalty entries need n >= 1 and finite d_n >= 0");
      }
    }
    const auto& [n_first, d_first] = *table.begin();
    const auto& [n_last, d_last] = *table.rbegin();
    const double r_first = d_first / static_cast<double>(n_first);
    const double r_last = d_last / static_cast<double>(n_last);
    if (!(r_last < 1.0) || (table.size() > 1 && r_last > 0.0 && !(r_last < r_first))) {
      throw Error(Errc::InvalidPenalty, "custom penalty table does not show d_n / n -> 0");
    }
    return {Custom{std::make_shared<const std::map<std::uint64_t, double>>(std::move(table))}, std::move(label)};
  }

  /// Reads "n,d_n" (or whitespace separated) pairs, one per line; '#' starts a comment.
  static PenaltySequence custom_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidPenalty, "cannot open custom penalty table '" + path + "'");
    std::map<std::uint64_t, double> table;
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      for (char& ch : line) {
        if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
      }
      std::istringstream ls(line);
      std::string a, b, extra;
      if (!(ls >> a)) continue;
      if (!(ls >> b) || (ls >> extra)) throw Error(Errc::InvalidPenalty, "malformed custom penalty line: " + line);
      const double n = detail::parse_real(a, "n");
      if (n < 1.0 || n != std::floor(n)) throw Error(Errc::InvalidPenalty, "custom penalty n must be a positive integer");
      table[static_cast<std::uint64_t>(n)] = detail::parse_real(b, "d_n");
    }
    return custom(std::move(table), "custom:" + path);
  }

  /// Parses "aic", "bic", "hq:<c>", "const:<a>" or "custom:<path>".
  static PenaltySequence parse(std::string_view spec) {
    if (spec == "aic") return aic();
    if (spec == "bic") return bic();
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw Error(Errc::InvalidPenalty, "unknown penalty '" + std::string(spec) + "'");
    const auto head = spec.substr(0, colon);
    const auto arg = spec.substr(colon + 1);
    if (arg.empty()) throw Error(Errc::InvalidPenalty, "penalty '" + std::string(spec) + "' is missing its argument");
    if (head == "hq") return hannan_quinn(detail::parse_real(arg, "Hannan-Quinn constant"));
    if (head == "const") {
      const double a = detail::parse_real(arg, "constant penalty");
      return constant(a, "const:" + std::string(arg));
    }
    if (head == "custom") return custom_from_file(std::string(arg));
    throw Error(Errc::InvalidPenalty, "unknown penalty '" + std::string(spec) + "'");
  }

  /// d_n at sample size n >= 1. Real n is accepted so the rules can be probed
  /// off the integer grid; custom tables only answer integer n.
  double evaluate(double n) const {
    if (!(n >= 1.0) || !std::isfinite(n)) throw Error(Errc::DomainError, "penalty evaluated at n < 1");
    struct Visitor {
      double n;
      double operator()(const Constant& k) const { return k.value; }
      double operator()(const LogN&) const { return std::log(n); }
      double operator()(const HannanQuinn& k) const {
        if (n < 3.0) return 0.0;  // ln ln n is negative or undefined below e
        return std::max(0.0, 2.0 * k.c * std::log(std::log(n)));
      }
      double operator()(const Custom& k) const {
        if (n != std::floor(n)) throw Error(Errc::CustomTableMiss, "custom penalty needs an integer n");
        const auto it = k.table->find(static_cast<std::uint64_t>(n));
        if (it == k.table->end()) throw Error(Errc::CustomTableMiss, "custom penalty has no entry for n = " + detail::format_number(n));
        return it->second;
      }
    };
    return std::visit(Visitor{n}, kind_);
  }

  const Kind& kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

 private:
  PenaltySequence(Kind kind, std::string label) : kind_(std::move(kind)), label_(std::move(label)) {}

  Kind kind_;
  std::string label_;
};

/// H + (k/2) d_n.
inline double generic_criterion(double h, std::size_t k, double d_n) noexcept {
  return h + 0.5 * static_cast<double>(k) * d_n;
}

}  // namespace hqlab
