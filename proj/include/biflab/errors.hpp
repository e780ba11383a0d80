#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biflab {

enum class ErrorKind {
  ParseError,
  MalformedFamily,
  ChartOverflow,
  RootFindingFailure,
  DegenerateAtPoint,
  UnsupportedFamily,
  GridTooSmall,
  ExpansionHypothesisFailed,
  ContractionViolated,
  BranchAmbiguity,
  InvalidArgument,
};

std::string_view error_name(ErrorKind kind);

/// Numerical or input failure carrying a stable, user-visible error name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace biflab
