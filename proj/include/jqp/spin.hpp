#pragma once

// Spin-1/2 component operators (hbar = 1), measurement frames and the
// symmetric operator ordering used by the quasiprobabilities.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "jqp/density_matrix.hpp"
#include "jqp/errors.hpp"
#include "jqp/linalg.hpp"

namespace jqp {

inline constexpr double kUnitTol = 1e-12;
inline constexpr double kZeroMeanThreshold = 1e-9;

/// Unit vector in R^3.
class Direction {
 public:
  /// Throws DomainError unless (x, y, z) is unit within kUnitTol.
  static Direction unit(double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTol) {
      throw DomainError("direction is not unit norm (|n| = " + std::to_string(n) + ")");
    }
    return Direction(x, y, z);
  }

  static Direction normalized(double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero vector");
    return Direction(x / n, y / n, z / n);
  }

  static Direction normalized(const std::array<double, 3>& v) {
    return normalized(v[0], v[1], v[2]);
  }

  static Direction x_axis() { return Direction(1, 0, 0); }
  static Direction y_axis() { return Direction(0, 1, 0); }
  static Direction z_axis() { return Direction(0, 0, 1); }

  double x() const noexcept { return v_[0]; }
  double y() const noexcept { return v_[1]; }
  double z() const noexcept { return v_[2]; }
  const std::array<double, 3>& components() const noexcept { return v_; }

  Direction operator-() const { return Direction(-v_[0], -v_[1], -v_[2]); }

  double dot(const Direction& o) const { return x() * o.x() + y() * o.y() + z() * o.z(); }

  std::array<double, 3> cross(const Direction& o) const {
    return {y() * o.z() - z() * o.y(), z() * o.x() - x() * o.z(), x() * o.y() - y() * o.x()};
  }

 private:
  Direction(double x, double y, double z) : v_{x, y, z} {}
  std::array<double, 3> v_;
};

enum class Axis : std::size_t { a = 0, b = 1, c = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::a, Axis::b, Axis::c};

inline char axis_name(Axis u) { return "abc"[static_cast<std::size_t>(u)]; }

/// Orthonormal measurement triple of one spin. `a` is the anchored axis
/// (the spin's mean direction when it has one).
struct Frame {
  Direction a;
  Direction b;
  Direction c;

  const Direction& axis(Axis u) const {
    switch (u) {
      case Axis::a: return a;
      case Axis::b: return b;
      case Axis::c: return c;
    }
    return a;
  }

  /// Same frame with one axis negated.
  Frame flipped(Axis u) const {
    Frame f = *this;
    switch (u) {
      case Axis::a: f.a = -a; break;
      case Axis::b: f.b = -b; break;
      case Axis::c: f.c = -c; break;
    }
    return f;
  }

  /// Largest |dot| between distinct axes.
  double orthogonality_error() const {
    return std::max({std::abs(a.dot(b)), std::abs(a.dot(c)), std::abs(b.dot(c))});
  }
};

inline const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m{{0.0, 1.0}, {1.0, 0.0}};
  return m;
}
inline const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m{{0.0, Complex{0.0, -1.0}}, {Complex{0.0, 1.0}, 0.0}};
  return m;
}
inline const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m{{1.0, 0.0}, {0.0, -1.0}};
  return m;
}

/// S_n = (n . sigma) / 2.
inline ComplexMatrix spin_component(const Direction& n) {
  ComplexMatrix s(2);
  s(0, 0) = 0.5 * n.z();
  s(1, 1) = -0.5 * n.z();
  s(0, 1) = 0.5 * Complex{n.x(), -n.y()};
  s(1, 0) = 0.5 * Complex{n.x(), n.y()};
  return s;
}

/// Completes `a` to a right-handed orthonormal frame (a, b, c = a x b).
/// b starts as the part of x̂ orthogonal to a (ŷ when |a.x̂| > 0.9) and is
/// then rotated about a by `azimuth` radians.
inline Frame make_frame(const Direction& a, double azimuth = 0.0) {
  const Direction seed = std::abs(a.x()) > 0.9 ? Direction::y_axis() : Direction::x_axis();
  const double proj = seed.dot(a);
  const Direction b0 = Direction::normalized(seed.x() - proj * a.x(), seed.y() - proj * a.y(),
                                             seed.z() - proj * a.z());
  const Direction c0 = Direction::normalized(a.cross(b0));
  const double cs = std::cos(azimuth);
  const double sn = std::sin(azimuth);
  const Direction b = Direction::normalized(cs * b0.x() + sn * c0.x(), cs * b0.y() + sn * c0.y(),
                                            cs * b0.z() + sn * c0.z());
  const Direction c = Direction::normalized(a.cross(b));
  return Frame{a, b, c};
}

struct LadderOperators {
  ComplexMatrix raising;
  ComplexMatrix lowering;
};

/// Raising/lowering operators on the eigenbasis of S_n, built on the
/// transverse pair of make_frame(n): S± = S_b ± i S_c.
inline LadderOperators ladder_operators(const Direction& n) {
  const Frame f = make_frame(n);
  const ComplexMatrix sb = spin_component(f.b);
  const ComplexMatrix sc = spin_component(f.c);
  const Complex i{0.0, 1.0};
  return {sb + i * sc, sb - i * sc};
}

/// I ⊗ ... ⊗ op ⊗ ... ⊗ I with op on the given 1-based spin.
inline ComplexMatrix embed(const ComplexMatrix& op, std::size_t site, std::size_t n_spins) {
  if (op.dim() != 2) throw DimensionError("embed: operator must be 2x2");
  if (site < 1 || site > n_spins) {
    throw DimensionError("embed: site " + std::to_string(site) + " out of range 1.." +
                         std::to_string(n_spins));
  }
  const ComplexMatrix left = ComplexMatrix::identity(std::size_t{1} << (site - 1));
  const ComplexMatrix right = ComplexMatrix::identity(std::size_t{1} << (n_spins - site));
  return kron(kron(left, op), right);
}

/// (AB + BA) / 2
inline ComplexMatrix symmetrize2(const ComplexMatrix& a, const ComplexMatrix& b) {
  return 0.5 * (a * b + b * a);
}

/// Fully symmetrized triple product: the three groupings
/// A(BC+CB) + (BC+CB)A, B(CA+AC) + (CA+AC)B, C(AB+BA) + (AB+BA)C, over 12.
inline ComplexMatrix symmetrize3(const ComplexMatrix& a, const ComplexMatrix& b,
                                 const ComplexMatrix& c) {
  if (a.dim() != b.dim() || a.dim() != c.dim()) {
    throw DimensionError("symmetrize3: dimension mismatch");
  }
  auto group = [](const ComplexMatrix& x, const ComplexMatrix& y, const ComplexMatrix& z) {
    const ComplexMatrix yz = y * z + z * y;
    return x * yz + yz * x;
  };
  return (1.0 / 12.0) * (group(a, b, c) + group(b, c, a) + group(c, a, b));
}

struct MeanSpin {
  std::array<double, 3> vector{};
  double norm = 0.0;

  bool is_zero(double threshold = kZeroMeanThreshold) const noexcept { return norm < threshold; }

  /// Normalized mean direction; empty for a zero-average spin.
  std::optional<Direction> direction(double threshold = kZeroMeanThreshold) const {
    if (is_zero(threshold)) return std::nullopt;
    return Direction::normalized(vector);
  }
};

inline MeanSpin mean_spin(const DensityMatrix& rho, std::size_t site) {
  const std::size_t n = rho.n_spins();
  if (site < 1 || site > n) {
    throw DimensionError("mean_spin: site " + std::to_string(site) + " out of range 1.." +
                         std::to_string(n));
  }
  MeanSpin m;
  const ComplexMatrix* paulis[] = {&pauli_x(), &pauli_y(), &pauli_z()};
  double sq = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const Complex e = rho.expectation(embed(0.5 * *paulis[k], site, n));
    m.vector[k] = e.real();
    sq += e.real() * e.real();
  }
  m.norm = std::sqrt(sq);
  return m;
}

}  // namespace jqp
