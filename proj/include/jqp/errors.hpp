#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jqp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operand dimensions or indices do not fit the operation.
struct DimensionError : Error {
  using Error::Error;
};

/// A scalar parameter is outside the domain of a constructor or operation.
struct DomainError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

/// A matrix failed density-matrix validation. `failures` lists every
/// violated invariant together with the size of the violation.
struct InvalidStateError : Error {
  explicit InvalidStateError(std::vector<std::string> failures)
      : Error(join(failures)), failures(std::move(failures)) {}

  std::vector<std::string> failures;

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid density matrix";
    for (const auto& item : items) {
      out += "; ";
      out += item;
    }
    return out;
  }
};

/// Bisection was asked to refine a bracket whose endpoints agree in sign.
struct BracketError : Error {
  using Error::Error;
};

}  // namespace jqp
