#pragma once

// Dense complex matrix kernels for systems of at most a few spin-1/2s.
//
// Tensor index convention: for an n-spin operator, spin 1 is the most
// significant bit of the computational-basis index, i.e. kron(A1, A2, ...)
// places spin 1 in the slowest-varying position. Spin indices in this API
// are 1-based, matching the physics labelling.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jqp/errors.hpp"

namespace jqp {

using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-10;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  /// Row-major entries; throws DimensionError unless entries.size() == dim².
  ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
      : dim_(dim), data_(std::move(entries)) {
    if (data_.size() != dim_ * dim_) {
      throw DimensionError("ComplexMatrix: expected " +
                           std::to_string(dim_ * dim_) + " entries, got " +
                           std::to_string(data_.size()));
    }
  }

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
      : dim_(rows.size()) {
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
      if (row.size() != dim_) throw DimensionError("ComplexMatrix: ragged rows");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  /// |v><v|
  static ComplexMatrix projector(std::span<const Complex> ket) {
    ComplexMatrix m(ket.size());
    for (std::size_t r = 0; r < ket.size(); ++r)
      for (std::size_t c = 0; c < ket.size(); ++c)
        m(r, c) = ket[r] * std::conj(ket[c]);
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }

  std::span<const Complex> entries() const noexcept { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  ComplexMatrix& operator+=(const ComplexMatrix& other) {
    require_same_dim(other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& other) {
    require_same_dim(other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }

  ComplexMatrix& operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  void require_same_dim(const ComplexMatrix& other, const char* what) const {
    if (other.dim_ != dim_) {
      throw DimensionError(std::string(what) + ": dimension mismatch " +
                           std::to_string(dim_) + " vs " + std::to_string(other.dim_));
    }
  }

  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("max_abs_diff: dimension mismatch");
  double worst = 0.0;
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) worst = std::max(worst, std::abs(ea[i] - eb[i]));
  return worst;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("matmul: dimension mismatch " + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()));
  }
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex ark = a(r, k);
      if (ark == Complex{}) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  return matmul(a, b);
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t ra = 0; ra < na; ++ra)
    for (std::size_t ca = 0; ca < na; ++ca) {
      const Complex s = a(ra, ca);
      for (std::size_t rb = 0; rb < nb; ++rb)
        for (std::size_t cb = 0; cb < nb; ++cb) out(ra * nb + rb, ca * nb + cb) = s * b(rb, cb);
    }
  return out;
}

/// kron over a list of factors; the first factor is the most significant slot.
inline ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) return ComplexMatrix::identity(1);
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

inline Complex trace(const ComplexMatrix& a) {
  Complex t{};
  for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

/// Tr(A B) without forming the product.
inline Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("trace_of_product: dimension mismatch");
  Complex t{};
  const std::size_t n = a.dim();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) t += a(r, c) * b(c, r);
  return t;
}

/// Max-entry deviation from Hermiticity, max |H - H†|.
inline double hermiticity_error(const ComplexMatrix& h) {
  double worst = 0.0;
  for (std::size_t r = 0; r < h.dim(); ++r)
    for (std::size_t c = r; c < h.dim(); ++c)
      worst = std::max(worst, std::abs(h(r, c) - std::conj(h(c, r))));
  return worst;
}

class SubsystemLayout {
 public:
  explicit SubsystemLayout(std::size_t n_spins) : n_spins_(n_spins) {
    if (n_spins == 0 || n_spins > 4) {
      throw DimensionError("SubsystemLayout: n_spins must be in 1..4, got " +
                           std::to_string(n_spins));
    }
  }

  /// Layout inferred from a matrix dimension 2^n.
  static SubsystemLayout for_dim(std::size_t dim) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    if ((std::size_t{1} << n) != dim) {
      throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    return SubsystemLayout(n);
  }

  std::size_t n_spins() const noexcept { return n_spins_; }
  static constexpr std::size_t local_dim() noexcept { return 2; }
  std::size_t dim() const noexcept { return std::size_t{1} << n_spins_; }

  /// Bit position of a 1-based spin index inside a basis index.
  std::size_t bit_of(std::size_t spin) const {
    check_spin(spin);
    return n_spins_ - spin;
  }

  void check_spin(std::size_t spin) const {
    if (spin < 1 || spin > n_spins_) {
      throw DimensionError("spin index " + std::to_string(spin) + " out of range 1.." +
                           std::to_string(n_spins_));
    }
  }

 private:
  std::size_t n_spins_;
};

/// Reduced operator on the spins in `keep` (1-based, any order; the result
/// keeps them in ascending order).
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemLayout& layout,
                                   std::vector<std::size_t> keep) {
  if (rho.dim() != layout.dim()) throw DimensionError("partial_trace: layout does not match matrix");
  if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (auto s : keep) layout.check_spin(s);

  std::vector<std::size_t> traced;
  for (std::size_t s = 1; s <= layout.n_spins(); ++s)
    if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);

  const std::size_t kept_dim = std::size_t{1} << keep.size();
  const std::size_t traced_dim = std::size_t{1} << traced.size();

  // Scatter the bits of a sub-index into full-index positions of `spins`.
  auto scatter = [&](std::size_t sub, const std::vector<std::size_t>& spins) {
    std::size_t full = 0;
    for (std::size_t k = 0; k < spins.size(); ++k) {
      const std::size_t sub_bit = spins.size() - 1 - k;
      if ((sub >> sub_bit) & 1U) full |= std::size_t{1} << layout.bit_of(spins[k]);
    }
    return full;
  };

  ComplexMatrix out(kept_dim);
  for (std::size_t r = 0; r < kept_dim; ++r) {
    const std::size_t row_base = scatter(r, keep);
    for (std::size_t c = 0; c < kept_dim; ++c) {
      const std::size_t col_base = scatter(c, keep);
      Complex sum{};
      for (std::size_t t = 0; t < traced_dim; ++t) {
        const std::size_t offset = scatter(t, traced);
        sum += rho(row_base | offset, col_base | offset);
      }
      out(r, c) = sum;
    }
  }
  return out;
}

/// Transpose on the tensor factor of one spin only.
inline ComplexMatrix partial_transpose(const ComplexMatrix& rho, const SubsystemLayout& layout,
                                       std::size_t spin) {
  if (rho.dim() != layout.dim()) {
    throw DimensionError("partial_transpose: layout does not match matrix");
  }
  const std::size_t mask = std::size_t{1} << layout.bit_of(spin);
  ComplexMatrix out(rho.dim());
  for (std::size_t r = 0; r < rho.dim(); ++r)
    for (std::size_t c = 0; c < rho.dim(); ++c) {
      // Swap the spin's bit between row and column index.
      const std::size_t r_bit = r & mask;
      const std::size_t c_bit = c & mask;
      out((r & ~mask) | c_bit, (c & ~mask) | r_bit) = rho(r, c);
    }
  return out;
}

struct EigenOptions {
  double hermitian_tol = kHermitianTol;
  double off_diagonal_tol = 1e-12;
  int max_sweeps = 100;
};

/// Ascending eigenvalues of a Hermitian matrix.
///
/// H = A + iB is embedded as the real symmetric [[A, -B], [B, A]], whose
/// spectrum is that of H with every eigenvalue doubled; cyclic Jacobi
/// rotations diagonalize the embedding.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h,
                                                 const EigenOptions& opts = {}) {
  const double herm_err = hermiticity_error(h);
  if (herm_err > opts.hermitian_tol) {
    throw DomainError("hermitian_eigenvalues: matrix is not Hermitian (max |H - H^dagger| = " +
                      std::to_string(herm_err) + ")");
  }
  const std::size_t n = h.dim();
  const std::size_t m = 2 * n;
  std::vector<double> s(m * m);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return s[r * m + c]; };
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      // Symmetrize away the tolerated Hermiticity residue.
      const Complex z = 0.5 * (h(r, c) + std::conj(h(c, r)));
      at(r, c) = z.real();
      at(r + n, c + n) = z.real();
      at(r, c + n) = -z.imag();
      at(r + n, c) = z.imag();
    }

  double scale = 0.0;
  for (double v : s) scale = std::max(scale, std::abs(v));
  const double threshold = opts.off_diagonal_tol * std::max(1.0, scale);

  auto off_norm = [&] {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = r + 1; c < m; ++c) acc += at(r, c) * at(r, c);
    return std::sqrt(2.0 * acc);
  };

  int sweep = 0;
  while (off_norm() > threshold) {
    if (sweep++ >= opts.max_sweeps) {
      throw ConvergenceError("hermitian_eigenvalues: no convergence after " +
                             std::to_string(opts.max_sweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double cs = 1.0 / std::hypot(t, 1.0);
        const double sn = t * cs;
        for (std::size_t k = 0; k < m; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = cs * akp - sn * akq;
          at(k, q) = sn * akp + cs * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = cs * apk - sn * aqk;
          at(q, k) = sn * apk + cs * aqk;
        }
      }
  }

  std::vector<double> doubled(m);
  for (std::size_t i = 0; i < m; ++i) doubled[i] = at(i, i);
  std::sort(doubled.begin(), doubled.end());
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
  return values;
}

inline double min_eigenvalue(const ComplexMatrix& h, const EigenOptions& opts = {}) {
  return hermitian_eigenvalues(h, opts).front();
}

}  // namespace jqp
