#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rmt {

/// Failure categories surfaced by the library. The CLI prints them as the
/// first token of its one-line error report.
enum class ErrorKind {
  InvalidArgument,
  ConstantRow,
  ZeroRow,
  NotSymmetric,
  NoConvergence,
  DegenerateScale,
  RhoZero,
  NoSpectralGap,
  InvalidQ,
  ParseError,
  MissingSector,
  MissingValue,
  TooFewDates,
  DegenerateX,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Row-indexed failure (ConstantRow / ZeroRow). Callers that know the row
/// labels rethrow with the ticker attached.
class RowError : public Error {
 public:
  RowError(ErrorKind kind, std::size_t row, const std::string& message)
      : Error(kind, message), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace rmt
