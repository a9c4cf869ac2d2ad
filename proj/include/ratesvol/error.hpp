#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ratesvol {

enum class ErrorCode {
  // input / data
  FileNotFound,
  ParseError,
  MissingColumn,
  NonMonotoneDates,
  NonFiniteValue,
  ValueOutOfRange,
  NonPositiveVol,
  SparseMonth,
  InsufficientOverlap,
  MisalignedSeries,
  IndexOutOfRange,
  MaturityOutOfRange,
  InvalidRate,
  InvalidArgument,
  InvalidModel,
  StepTooLarge,
  // estimation
  RankDeficient,
  RankDeficientDesign,
  TooFewObservations,
  TooShort,
  DegenerateSeries,
  NoConvergence,
  // stability
  Unstable,
  NonFiniteState,
};

/// Broad failure class; the CLI maps it onto its exit-code taxonomy.
enum class ErrorKind { Input, Estimation, Stability };

std::string_view to_string(ErrorCode code) noexcept;
ErrorKind kind_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace ratesvol
