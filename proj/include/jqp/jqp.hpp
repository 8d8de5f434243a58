#pragma once

// Joint quasiprobability tables in symmetric operator ordering.
//
// For spin j with frame (a, b, c) and included axes U_j, the site factor is
//   F_j = I/2 + Σ_{u in U_j} ε_u S_u
// and the table entry is
//   p(ε) = 2^{-Σ_j (|U_j| - 1)} Tr[rho (F_1 ⊗ F_2 ⊗ ...)].
// With all three axes on every spin the prefactor is 2^{-2N}. Summing a
// table over one axis' signs reproduces the table with that axis removed.
//
// Entry order: spin 1 outermost, axes a before b before c within a spin,
// +1 before -1. Entry index bits are read most-significant first in that
// order, bit value 0 meaning +1.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jqp/density_matrix.hpp"
#include "jqp/errors.hpp"
#include "jqp/linalg.hpp"
#include "jqp/spin.hpp"

namespace jqp {

inline constexpr double kImagResidueTol = 1e-10;

/// Subset of {a, b, c} included for one spin.
class AxisSet {
 public:
  constexpr AxisSet() = default;

  static constexpr AxisSet full() { return AxisSet(0b111); }
  static constexpr AxisSet of(std::initializer_list<Axis> axes) {
    AxisSet s;
    for (Axis u : axes) s.bits_ |= bit(u);
    return s;
  }

  /// Parses strings like "abc", "bc" or "" (order-insensitive).
  static AxisSet parse(std::string_view text) {
    AxisSet s;
    for (char ch : text) {
      if (ch < 'a' || ch > 'c') {
        throw DomainError("axis set '" + std::string(text) + "' may only contain a, b, c");
      }
      s.bits_ |= bit(static_cast<Axis>(ch - 'a'));
    }
    return s;
  }

  constexpr bool contains(Axis u) const { return (bits_ & bit(u)) != 0; }
  constexpr std::size_t size() const {
    return ((bits_ >> 0) & 1U) + ((bits_ >> 1) & 1U) + ((bits_ >> 2) & 1U);
  }
  constexpr AxisSet without(Axis u) const { return AxisSet(bits_ & ~bit(u)); }

  std::vector<Axis> axes() const {
    std::vector<Axis> out;
    for (Axis u : kAxes)
      if (contains(u)) out.push_back(u);
    return out;
  }

  std::string str() const {
    std::string out;
    for (Axis u : axes()) out += axis_name(u);
    return out;
  }

  friend constexpr bool operator==(AxisSet, AxisSet) = default;

 private:
  constexpr explicit AxisSet(std::uint8_t bits) : bits_(bits) {}
  static constexpr std::uint8_t bit(Axis u) {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(u));
  }
  std::uint8_t bits_ = 0;
};

/// Included axes per spin.
using DirectionSubset = std::vector<AxisSet>;

inline DirectionSubset full_subset(std::size_t n_spins) {
  return DirectionSubset(n_spins, AxisSet::full());
}

inline std::string subset_str(const DirectionSubset& s) {
  std::string out;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j) out += ';';
    out += s[j].str();
  }
  return out;
}

/// Per spin, per axis a sign in {-1, +1}; 0 marks an axis not in the table.
struct SignAssignment {
  std::vector<std::array<int, 3>> signs;

  int sign(std::size_t spin_index, Axis u) const {
    return signs.at(spin_index)[static_cast<std::size_t>(u)];
  }

  friend bool operator==(const SignAssignment&, const SignAssignment&) = default;
};

/// p = Tr[rho F] has exactly one sign per (spin, included axis).
class JqpTable {
 public:
  JqpTable(std::vector<Frame> frames, DirectionSubset subset, std::vector<double> values,
           double max_imag_residue = 0.0)
      : frames_(std::move(frames)),
        subset_(std::move(subset)),
        values_(std::move(values)),
        max_imag_residue_(max_imag_residue) {
    if (frames_.size() != subset_.size()) throw DimensionError("JqpTable: frame/subset count mismatch");
    if (values_.size() != entry_count(subset_)) throw DimensionError("JqpTable: wrong number of entries");
  }

  static std::size_t entry_count(const DirectionSubset& subset) {
    std::size_t bits = 0;
    for (auto s : subset) bits += s.size();
    return std::size_t{1} << bits;
  }

  std::size_t n_spins() const noexcept { return subset_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  const DirectionSubset& subset() const noexcept { return subset_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t index) const { return values_.at(index); }
  double max_imag_residue() const noexcept { return max_imag_residue_; }

  double total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

  SignAssignment assignment(std::size_t index) const { return decode(subset_, index); }
  std::size_t index_of(const SignAssignment& s) const { return encode(subset_, s); }
  double at(const SignAssignment& s) const { return values_.at(index_of(s)); }

  static SignAssignment decode(const DirectionSubset& subset, std::size_t index) {
    std::size_t remaining = 0;
    for (auto s : subset) remaining += s.size();
    SignAssignment out;
    out.signs.resize(subset.size(), {0, 0, 0});
    for (std::size_t j = 0; j < subset.size(); ++j)
      for (Axis u : kAxes) {
        if (!subset[j].contains(u)) continue;
        --remaining;
        out.signs[j][static_cast<std::size_t>(u)] = ((index >> remaining) & 1U) ? -1 : 1;
      }
    return out;
  }

  static std::size_t encode(const DirectionSubset& subset, const SignAssignment& s) {
    if (s.signs.size() != subset.size()) throw DimensionError("sign assignment has wrong spin count");
    std::size_t index = 0;
    for (std::size_t j = 0; j < subset.size(); ++j)
      for (Axis u : kAxes) {
        const int e = s.signs[j][static_cast<std::size_t>(u)];
        if (!subset[j].contains(u)) {
          if (e != 0) throw DomainError("sign given for an axis not in the table");
          continue;
        }
        if (e != 1 && e != -1) throw DomainError("signs must be +1 or -1");
        index = (index << 1) | (e == -1 ? 1U : 0U);
      }
    return index;
  }

 private:
  std::vector<Frame> frames_;
  DirectionSubset subset_;
  std::vector<double> values_;
  double max_imag_residue_;
};

/// I/2 + Σ_{u in axes} ε_u S_u for one spin.
inline ComplexMatrix site_factor(const Frame& frame, AxisSet axes, const std::array<int, 3>& signs) {
  ComplexMatrix f = 0.5 * ComplexMatrix::identity(2);
  for (Axis u : axes.axes()) {
    f += static_cast<double>(signs[static_cast<std::size_t>(u)]) * spin_component(frame.axis(u));
  }
  return f;
}

/// Quasiprobability table of rho for the given per-spin frames and axes.
/// Throws Error if any entry has an imaginary part above kImagResidueTol.
inline JqpTable jqp_table(const DensityMatrix& rho, const std::vector<Frame>& frames,
                          const DirectionSubset& subset) {
  const std::size_t n = rho.n_spins();
  if (frames.size() != n) {
    throw DimensionError("jqp_table: " + std::to_string(frames.size()) + " frames for " +
                         std::to_string(n) + " spins");
  }
  if (subset.size() != n) throw DimensionError("jqp_table: subset has wrong spin count");

  int exponent = 0;
  for (auto s : subset) exponent += static_cast<int>(s.size()) - 1;
  const double prefactor = std::ldexp(1.0, -exponent);

  // Site factors depend only on that spin's signs: cache 2^|U_j| per spin.
  std::vector<std::vector<ComplexMatrix>> cache(n);
  for (std::size_t j = 0; j < n; ++j) {
    const DirectionSubset single{subset[j]};
    const std::size_t count = JqpTable::entry_count(single);
    for (std::size_t k = 0; k < count; ++k) {
      cache[j].push_back(site_factor(frames[j], subset[j], JqpTable::decode(single, k).signs[0]));
    }
  }

  const std::size_t entries = JqpTable::entry_count(subset);
  std::vector<double> values(entries);
  double worst_imag = 0.0;
  std::vector<ComplexMatrix> factors(n);
  for (std::size_t index = 0; index < entries; ++index) {
    // Split the flat index into per-spin local indices (spin 1 most significant).
    std::size_t rest = index;
    for (std::size_t j = n; j-- > 0;) {
      const std::size_t width = subset[j].size();
      factors[j] = cache[j][rest & ((std::size_t{1} << width) - 1)];
      rest >>= width;
    }
    const Complex p = prefactor * rho.expectation(kron_all(factors));
    worst_imag = std::max(worst_imag, std::abs(p.imag()));
    values[index] = p.real();
  }
  if (worst_imag > kImagResidueTol) {
    throw Error("jqp_table: imaginary residue " + std::to_string(worst_imag) +
                " exceeds tolerance; operator is not Hermitian");
  }
  return JqpTable(frames, subset, std::move(values), worst_imag);
}

inline JqpTable full_jqp_table(const DensityMatrix& rho, const std::vector<Frame>& frames) {
  return jqp_table(rho, frames, full_subset(rho.n_spins()));
}

namespace detail {

template <class Reduce>
JqpTable remap(const JqpTable& t, std::vector<Frame> frames, DirectionSubset subset, Reduce reduce) {
  std::vector<double> values(JqpTable::entry_count(subset), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    values[JqpTable::encode(subset, reduce(t.assignment(i)))] += t.value(i);
  }
  return JqpTable(std::move(frames), std::move(subset), std::move(values), t.max_imag_residue());
}

}  // namespace detail

/// Sums over the signs of one axis at one spin (1-based).
inline JqpTable marginalize_direction(const JqpTable& t, std::size_t spin, Axis u) {
  if (spin < 1 || spin > t.n_spins()) throw DimensionError("marginalize_direction: spin out of range");
  const std::size_t j = spin - 1;
  if (!t.subset()[j].contains(u)) {
    throw DomainError(std::string("marginalize_direction: axis ") + axis_name(u) +
                      " is not in the table for spin " + std::to_string(spin));
  }
  DirectionSubset subset = t.subset();
  subset[j] = subset[j].without(u);
  return detail::remap(t, t.frames(), subset, [&](SignAssignment s) {
    s.signs[j][static_cast<std::size_t>(u)] = 0;
    return s;
  });
}

/// Sums over every sign of one spin, dropping it from the table.
inline JqpTable marginalize_spin(const JqpTable& t, std::size_t spin) {
  if (t.n_spins() < 2) throw DimensionError("marginalize_spin: table has a single spin");
  if (spin < 1 || spin > t.n_spins()) throw DimensionError("marginalize_spin: spin out of range");
  const std::size_t j = spin - 1;
  std::vector<Frame> frames = t.frames();
  DirectionSubset subset = t.subset();
  frames.erase(frames.begin() + static_cast<std::ptrdiff_t>(j));
  subset.erase(subset.begin() + static_cast<std::ptrdiff_t>(j));
  return detail::remap(t, std::move(frames), std::move(subset), [&](SignAssignment s) {
    s.signs.erase(s.signs.begin() + static_cast<std::ptrdiff_t>(j));
    return s;
  });
}

struct TableExtremum {
  double min_value = 0.0;
  std::size_t index = 0;
  SignAssignment argmin;
};

/// Exhaustive minimum; ties resolve to the first entry in table order.
inline TableExtremum extremum(const JqpTable& t) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t.value(i) < t.value(best)) best = i;
  return {t.value(best), best, t.assignment(best)};
}

}  // namespace jqp
