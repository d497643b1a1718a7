#include "admd/error.hpp"

namespace admd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::NoValidWindow: return "NoValidWindow";
    case ErrorKind::InsufficientHistory: return "InsufficientHistory";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::EigFailure: return "EigFailure";
    case ErrorKind::AllZero: return "AllZero";
    case ErrorKind::DegenerateAmplitudes: return "DegenerateAmplitudes";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::ConfigInfeasible: return "ConfigInfeasible";
    case ErrorKind::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateData:
    case ErrorKind::EigFailure:
    case ErrorKind::AllZero:
    case ErrorKind::DegenerateAmplitudes:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NonFinite:
    case ErrorKind::ZeroVariance:
      return true;
    default:
      return false;
  }
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace admd
