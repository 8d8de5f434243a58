#pragma once

// Constructors for the studied two- and three-spin families, generic product
// states, and validated ingestion of raw matrices.
//
// Single-spin basis: |+> = (1, 0), |-> = (0, 1), eigenstates of S_z.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jqp/density_matrix.hpp"
#include "jqp/errors.hpp"
#include "jqp/linalg.hpp"
#include "jqp/spin.hpp"

namespace jqp {

using Ket = std::vector<Complex>;

namespace detail {

inline void require_range(std::string_view name, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    throw DomainError(std::string(name) + " = " + std::to_string(v) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

/// Two-spin product basis ket |s1, s2>, s = 0 for +, 1 for -.
inline Ket basis2(int s1, int s2) {
  Ket k(4);
  k[static_cast<std::size_t>(2 * s1 + s2)] = 1.0;
  return k;
}

inline Ket combine(Complex ca, const Ket& a, Complex cb, const Ket& b) {
  Ket out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ca * a[i] + cb * b[i];
  return out;
}

inline double beta_of(double alpha) { return std::sqrt(std::max(0.0, 1.0 - alpha * alpha)); }

}  // namespace detail

/// psi0 = (|+-> - |-+>)/√2 (singlet), psi1 = (|+-> + |-+>)/√2,
/// psi2 = (|++> + |-->)/√2, psi3 = (|++> - |-->)/√2.
inline std::array<Ket, 4> bell_basis() {
  using detail::basis2;
  using detail::combine;
  const double h = 1.0 / std::sqrt(2.0);
  return {combine(h, basis2(0, 1), -h, basis2(1, 0)), combine(h, basis2(0, 1), h, basis2(1, 0)),
          combine(h, basis2(0, 0), h, basis2(1, 1)), combine(h, basis2(0, 0), -h, basis2(1, 1))};
}

/// (1-x)/4 I + x |psi0><psi0|,  0 <= x <= 1.
inline DensityMatrix werner(double x) {
  detail::require_range("x", x, 0.0, 1.0);
  const auto bell = bell_basis();
  return DensityMatrix::validate(
      ((1.0 - x) / 4.0) * ComplexMatrix::identity(4) + x * ComplexMatrix::projector(bell[0]), 2);
}

/// x |psi0><psi0| + (1-x) |++><++|
inline DensityMatrix peres_mix(double x) {
  detail::require_range("x", x, 0.0, 1.0);
  const auto bell = bell_basis();
  return DensityMatrix::validate(x * ComplexMatrix::projector(bell[0]) +
                                     (1.0 - x) * ComplexMatrix::projector(detail::basis2(0, 0)),
                                 2);
}

/// Σ x_i |psi_i><psi_i| with non-negative weights summing to one.
inline DensityMatrix bell_diagonal(const std::array<double, 4>& weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(weights[i] >= 0.0)) {
      throw DomainError("bell_diagonal: weight x" + std::to_string(i) + " = " +
                        std::to_string(weights[i]) + " is negative");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("bell_diagonal: weights sum to " + std::to_string(total) + ", not 1");
  }
  const auto bell = bell_basis();
  ComplexMatrix m(4);
  for (std::size_t i = 0; i < 4; ++i) m += weights[i] * ComplexMatrix::projector(bell[i]);
  return DensityMatrix::validate(std::move(m), 2);
}

/// x |psi><psi| + (1-x)/2 (|++><++| + |--><--|), psi = α|+-> + β|-+>,
/// β = +sqrt(1 - α²).
inline DensityMatrix gisin(double x, double alpha) {
  detail::require_range("x", x, 0.0, 1.0);
  detail::require_range("alpha", alpha, -1.0, 1.0);
  const double beta = detail::beta_of(alpha);
  const Ket psi = detail::combine(alpha, detail::basis2(0, 1), beta, detail::basis2(1, 0));
  return DensityMatrix::validate(
      x * ComplexMatrix::projector(psi) +
          ((1.0 - x) / 2.0) * (ComplexMatrix::projector(detail::basis2(0, 0)) +
                               ComplexMatrix::projector(detail::basis2(1, 1))),
      2);
}

/// (1-x) |phi><phi| + x |psi><psi|, phi = α|++> + β|-->, psi = α|+-> + β|-+>.
inline DensityMatrix horodecki_mix(double x, double alpha) {
  detail::require_range("x", x, 0.0, 1.0);
  detail::require_range("alpha", alpha, -1.0, 1.0);
  const double beta = detail::beta_of(alpha);
  const Ket phi = detail::combine(alpha, detail::basis2(0, 0), beta, detail::basis2(1, 1));
  const Ket psi = detail::combine(alpha, detail::basis2(0, 1), beta, detail::basis2(1, 0));
  return DensityMatrix::validate(
      (1.0 - x) * ComplexMatrix::projector(phi) + x * ComplexMatrix::projector(psi), 2);
}

/// Three-spin state I/8 + (1/6) S2.S3 - (c/4)(S1.S3 + S1.S2).
/// Positivity is checked numerically; the error carries the eigenvalue margin.
inline DensityMatrix toth_acin(double c) {
  if (!std::isfinite(c)) throw DomainError("toth_acin: c must be finite");
  auto dot = [](std::size_t i, std::size_t j) {
    ComplexMatrix acc(8);
    for (const auto* p : {&pauli_x(), &pauli_y(), &pauli_z()}) {
      const ComplexMatrix s = 0.5 * *p;
      acc += embed(s, i, 3) * embed(s, j, 3);
    }
    return acc;
  };
  ComplexMatrix m = (1.0 / 8.0) * ComplexMatrix::identity(8) + (1.0 / 6.0) * dot(2, 3) -
                    (c / 4.0) * (dot(1, 3) + dot(1, 2));
  return DensityMatrix::validate(std::move(m), 3);
}

/// ⊗_j (I + r_j . sigma)/2 for Bloch vectors with |r_j| <= 1.
inline DensityMatrix product_state(std::span<const std::array<double, 3>> bloch) {
  if (bloch.empty() || bloch.size() > 3) {
    throw DomainError("product_state: need 1 to 3 Bloch vectors");
  }
  std::vector<ComplexMatrix> factors;
  for (std::size_t j = 0; j < bloch.size(); ++j) {
    const auto& r = bloch[j];
    const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (!(norm <= 1.0 + 1e-12)) {
      throw DomainError("product_state: Bloch vector " + std::to_string(j + 1) + " has norm " +
                        std::to_string(norm) + " > 1");
    }
    factors.push_back(0.5 * (ComplexMatrix::identity(2) + r[0] * pauli_x() + r[1] * pauli_y() +
                             r[2] * pauli_z()));
  }
  return DensityMatrix::validate(kron_all(factors), bloch.size());
}

/// Validates a row-major entry list as an n-spin state.
inline DensityMatrix from_raw(std::span<const Complex> entries, std::size_t n_spins) {
  if (n_spins < 1 || n_spins > 3) throw InvalidStateError({"n_spins must be 1, 2 or 3"});
  const std::size_t dim = std::size_t{1} << n_spins;
  if (entries.size() != dim * dim) {
    throw InvalidStateError({"expected " + std::to_string(dim * dim) + " entries for " +
                             std::to_string(n_spins) + " spins, got " +
                             std::to_string(entries.size())});
  }
  return DensityMatrix::validate(ComplexMatrix(dim, {entries.begin(), entries.end()}), n_spins);
}

enum class Family { werner, peres_mix, bell_diagonal, gisin, horodecki_mix, toth_acin, product, raw };

struct FamilyInfo {
  Family family;
  std::string_view name;
  std::vector<std::string_view> params;
  std::string_view constraints;
  std::string_view description;
};

inline const std::vector<FamilyInfo>& family_catalog() {
  static const std::vector<FamilyInfo> catalog{
      {Family::werner, "werner", {"x"}, "0 <= x <= 1",
       "(1-x)/4 I + x |singlet><singlet|"},
      {Family::peres_mix, "peres_mix", {"x"}, "0 <= x <= 1",
       "x |singlet><singlet| + (1-x) |++><++|"},
      {Family::bell_diagonal, "bell_diagonal", {"x0", "x1", "x2", "x3"},
       "x_i >= 0, sum x_i = 1", "sum_i x_i |psi_i><psi_i| over the Bell basis"},
      {Family::gisin, "gisin", {"x", "alpha"}, "0 <= x <= 1, |alpha| <= 1, beta = sqrt(1-alpha^2)",
       "x |psi><psi| + (1-x)/2 (|++><++| + |--><--|), psi = alpha|+-> + beta|-+>"},
      {Family::horodecki_mix, "horodecki_mix", {"x", "alpha"},
       "0 <= x <= 1, |alpha| <= 1, beta = sqrt(1-alpha^2)",
       "(1-x) |phi><phi| + x |psi><psi|, phi = alpha|++> + beta|-->, psi = alpha|+-> + beta|-+>"},
      {Family::toth_acin, "toth_acin", {"c"}, "positive semidefinite for -2/3 <= c <= 4/3",
       "three spins: I/8 + (1/6) S2.S3 - (c/4)(S1.S3 + S1.S2)"},
      {Family::product, "product", {"r1x", "r1y", "r1z", "r2x", "..."},
       "1 to 3 spins, |r_j| <= 1", "tensor product of (I + r_j.sigma)/2"},
      {Family::raw, "raw", {}, "Hermitian, unit trace, positive semidefinite",
       "explicit 2^n x 2^n matrix"},
  };
  return catalog;
}

inline std::optional<Family> family_from_name(std::string_view name) {
  for (const auto& info : family_catalog())
    if (info.name == name) return info.family;
  return std::nullopt;
}

inline std::string_view family_name(Family f) {
  for (const auto& info : family_catalog())
    if (info.family == f) return info.name;
  return "unknown";
}

/// Declarative description of a state: a family plus its named parameters, or
/// a raw matrix.
struct StateSpec {
  Family family = Family::werner;
  std::map<std::string, double> params;
  std::vector<Complex> raw_entries;
  std::size_t raw_n_spins = 0;

  double param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) {
      throw DomainError("state family " + std::string(family_name(family)) +
                        " requires parameter '" + name + "'");
    }
    return it->second;
  }

  /// Copy with one parameter replaced.
  StateSpec with(const std::string& name, double value) const {
    StateSpec s = *this;
    s.params[name] = value;
    return s;
  }
};

inline DensityMatrix build_state(const StateSpec& spec) {
  switch (spec.family) {
    case Family::werner: return werner(spec.param("x"));
    case Family::peres_mix: return peres_mix(spec.param("x"));
    case Family::bell_diagonal:
      return bell_diagonal(
          {spec.param("x0"), spec.param("x1"), spec.param("x2"), spec.param("x3")});
    case Family::gisin: return gisin(spec.param("x"), spec.param("alpha"));
    case Family::horodecki_mix: return horodecki_mix(spec.param("x"), spec.param("alpha"));
    case Family::toth_acin: return toth_acin(spec.param("c"));
    case Family::product: {
      std::vector<std::array<double, 3>> bloch;
      for (std::size_t j = 1; j <= 3; ++j) {
        const std::string p = "r" + std::to_string(j);
        if (!spec.params.contains(p + "x") && !spec.params.contains(p + "y") &&
            !spec.params.contains(p + "z")) {
          break;
        }
        auto get = [&](const std::string& k) {
          auto it = spec.params.find(k);
          return it == spec.params.end() ? 0.0 : it->second;
        };
        bloch.push_back({get(p + "x"), get(p + "y"), get(p + "z")});
      }
      return product_state(bloch);
    }
    case Family::raw: return from_raw(spec.raw_entries, spec.raw_n_spins);
  }
  throw DomainError("unknown state family");
}

}  // namespace jqp
