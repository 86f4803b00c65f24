#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hqlab {

enum class Errc {
  DimensionMismatch,
  RankDeficient,
  DomainError,
  NonFinite,
  CustomTableMiss,
  InvalidPenalty,
  DegenerateFit,
  TooManyRegressors,
  LagTooLarge,
  SingularSystem,
  NonpositiveVariance,
  DegenerateVariance,
  ZeroVariance,
  NonStationary,
  EmptyDataset,
  ParseError,
  ConfigError,
  InvalidArgument,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::DomainError: return "DomainError";
    case Errc::NonFinite: return "NonFinite";
    case Errc::CustomTableMiss: return "CustomTableMiss";
    case Errc::InvalidPenalty: return "InvalidPenalty";
    case Errc::DegenerateFit: return "DegenerateFit";
    case Errc::TooManyRegressors: return "TooManyRegressors";
    case Errc::LagTooLarge: return "LagTooLarge";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::NonpositiveVariance: return "NonpositiveVariance";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::NonStationary: return "NonStationary";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::ParseError: return "ParseError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hqlab
