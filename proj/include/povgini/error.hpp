#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace povgini {

enum class ErrorKind {
  EmptyDataset,
  DegenerateWeights,
  Parameter,
  Configuration,
  NonPositiveMean,
  Schema,
  Row,
  Validation,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers branch
/// without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace povgini
