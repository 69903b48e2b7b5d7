#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace podsurf {

enum class ErrorCode {
  NonFinite,
  DimensionMismatch,
  DuplicateParameter,
  InvalidWeights,
  InvalidArgument,
  IoFailure,
  BadMagic,
  VersionUnsupported,
  TruncatedFile,
  SchemaMismatch,
  RankTooLarge,
  DegenerateMatrix,
  IndexOutOfRange,
  DuplicateInput,
  TooFewPoints,
  CholeskyFailure,
  SingularSystem,
  UnsupportedDimension,
  DegenerateGeometry,
  OutOfHull,
  ZeroTruthNorm,
  SolverDiverged,
  OutOfBounds,
  CountTooSmall,
  NonFiniteObjective,
  Usage,
};

/// Stable identifier used in the `error[CODE]:` prefix of the CLI.
std::string_view to_string(ErrorCode code);

/// Single exception type of the library. The code is what callers branch on;
/// the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  /// NonFinite errors carry the offending (row, col) entry.
  Error(ErrorCode code, const std::string& message, std::size_t row, std::size_t col)
      : std::runtime_error(message), code_(code), row_(row), col_(col) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> col() const noexcept { return col_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> col_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace podsurf
