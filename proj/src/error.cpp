#include "ratesvol/error.hpp"

namespace ratesvol {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonMonotoneDates: return "NonMonotoneDates";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::NonPositiveVol: return "NonPositiveVol";
    case ErrorCode::SparseMonth: return "SparseMonth";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::MisalignedSeries: return "MisalignedSeries";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::MaturityOutOfRange: return "MaturityOutOfRange";
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::RankDeficientDesign:
    case ErrorCode::TooFewObservations:
    case ErrorCode::TooShort:
    case ErrorCode::DegenerateSeries:
    case ErrorCode::NoConvergence:
      return ErrorKind::Estimation;
    case ErrorCode::Unstable:
    case ErrorCode::NonFiniteState:
      return ErrorKind::Stability;
    default:
      return ErrorKind::Input;
  }
}

}  // namespace ratesvol
