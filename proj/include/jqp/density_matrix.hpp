#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jqp/errors.hpp"
#include "jqp/linalg.hpp"

namespace jqp {

inline constexpr double kStateTol = 1e-10;

/// Outcome of checking a candidate matrix against the density-matrix
/// invariants. Populated even when checks fail so callers can report margins.
struct StateDiagnostics {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<std::string> failures;

  bool ok() const noexcept { return failures.empty(); }
};

inline StateDiagnostics diagnose_state(const ComplexMatrix& m, std::size_t n_spins,
                                       double tol = kStateTol) {
  StateDiagnostics d;
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
  };

  if (n_spins < 1 || n_spins > 3) {
    d.failures.push_back("n_spins must be 1, 2 or 3 (got " + std::to_string(n_spins) + ")");
    return d;
  }
  if (m.dim() != (std::size_t{1} << n_spins)) {
    d.failures.push_back("dimension " + std::to_string(m.dim()) + " does not equal 2^" +
                         std::to_string(n_spins));
    return d;
  }
  if (!m.all_finite()) {
    d.failures.push_back("matrix has non-finite entries");
    return d;
  }

  d.hermiticity_error = hermiticity_error(m);
  if (d.hermiticity_error > tol) {
    d.failures.push_back("not Hermitian: max |rho - rho^dagger| = " + fmt(d.hermiticity_error));
  }
  const Complex tr = trace(m);
  d.trace_error = std::abs(tr - Complex{1.0, 0.0});
  if (d.trace_error > tol) {
    d.failures.push_back("trace is " + fmt(tr.real()) + (tr.imag() != 0.0 ? "+i" + fmt(tr.imag()) : "") +
                         ", off by " + fmt(d.trace_error));
  }
  if (d.hermiticity_error <= tol) {
    d.min_eigenvalue = min_eigenvalue(m, EigenOptions{.hermitian_tol = tol});
    if (d.min_eigenvalue < -tol) {
      d.failures.push_back("not positive semidefinite: min eigenvalue " + fmt(d.min_eigenvalue));
    }
  }
  return d;
}

/// A validated state of 1 to 3 spin-1/2s: Hermitian, unit trace and positive
/// semidefinite, each within kStateTol.
class DensityMatrix {
 public:
  /// Throws InvalidStateError listing every failed invariant.
  static DensityMatrix validate(ComplexMatrix m, std::size_t n_spins, double tol = kStateTol) {
    auto diag = diagnose_state(m, n_spins, tol);
    if (!diag.ok()) throw InvalidStateError(std::move(diag.failures));
    return DensityMatrix(std::move(m), n_spins);
  }

  std::size_t n_spins() const noexcept { return n_spins_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  SubsystemLayout layout() const { return SubsystemLayout(n_spins_); }

  /// Tr(rho A)
  Complex expectation(const ComplexMatrix& op) const { return trace_of_product(matrix_, op); }

 private:
  DensityMatrix(ComplexMatrix m, std::size_t n) : n_spins_(n), matrix_(std::move(m)) {}

  std::size_t n_spins_;
  ComplexMatrix matrix_;
};

/// Reduced state of the listed spins.
inline DensityMatrix reduce(const DensityMatrix& rho, std::vector<std::size_t> keep) {
  auto m = partial_trace(rho.matrix(), rho.layout(), std::move(keep));
  const std::size_t n = SubsystemLayout::for_dim(m.dim()).n_spins();
  return DensityMatrix::validate(std::move(m), n);
}

}  // namespace jqp
