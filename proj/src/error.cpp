#include "etd/error.hpp"

namespace etd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::Numerical: return "Numerical";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

}  // namespace etd
