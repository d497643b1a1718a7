#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace admd {

enum class ErrorKind {
  InvalidInput,
  ParseError,
  ZeroVariance,
  OutOfBounds,
  NoValidWindow,
  InsufficientHistory,
  EmptyWindow,
  DegenerateData,
  EigFailure,
  AllZero,
  DegenerateAmplitudes,
  DimensionMismatch,
  MissingCell,
  ConfigInfeasible,
  NonFinite,
};

std::string_view to_string(ErrorKind kind);

/// True for failures caused by the numerics of a fit or evaluation rather
/// than by malformed input. The CLI maps these to exit code 3.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace admd
