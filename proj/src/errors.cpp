#include "biflab/errors.hpp"

namespace biflab {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MalformedFamily: return "MalformedFamily";
    case ErrorKind::ChartOverflow: return "ChartOverflow";
    case ErrorKind::RootFindingFailure: return "RootFindingFailure";
    case ErrorKind::DegenerateAtPoint: return "DegenerateAtPoint";
    case ErrorKind::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::ExpansionHypothesisFailed: return "ExpansionHypothesisFailed";
    case ErrorKind::ContractionViolated: return "ContractionViolated";
    case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind) {}

}  // namespace biflab
