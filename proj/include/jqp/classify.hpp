#pragma once

// Two-stage classicality test, partial-transpose separability check and
// parameter bisection for family thresholds.
//
// Stage (i): some candidate frame assignment yields a full three-axis table
// with every entry >= -tol -> ClassicalSeparable.
// Stage (ii): some candidate frame assignment and some choice of two axes per
// spin yields a non-negative reduced table -> Classical.
// Otherwise NotIdentified.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "jqp/density_matrix.hpp"
#include "jqp/errors.hpp"
#include "jqp/jqp.hpp"
#include "jqp/linalg.hpp"
#include "jqp/spin.hpp"
#include "jqp/states.hpp"

namespace jqp {

inline constexpr double kClassifyTol = 1e-10;

using FrameAssignment = std::vector<Frame>;

/// How the transverse (b, c) freedom, and the whole frame of zero-average
/// spins, is sampled.
struct FramePolicy {
  enum class Mode { canonical, azimuthal_grid, random };

  Mode mode = Mode::canonical;
  std::size_t count = 1;  // K for the grid, M for random sampling
  Direction zero_mean_axis = Direction::z_axis();
  std::uint64_t seed = 0;

  static FramePolicy canonical() { return {}; }

  static FramePolicy grid(std::size_t k) {
    if (k < 1) throw DomainError("azimuthal grid needs K >= 1");
    FramePolicy p;
    p.mode = Mode::azimuthal_grid;
    p.count = k;
    return p;
  }

  static FramePolicy random(std::size_t m, std::uint64_t seed = 0) {
    if (m < 1) throw DomainError("random frame policy needs M >= 1");
    FramePolicy p;
    p.mode = Mode::random;
    p.count = m;
    p.seed = seed;
    return p;
  }

  /// "canonical", "grid:K" or "random:M".
  static FramePolicy parse(std::string_view text, std::uint64_t seed = 0) {
    auto count_after = [&](std::string_view prefix) -> std::size_t {
      const std::string rest(text.substr(prefix.size()));
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(rest, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != rest.size() || rest.empty() || v < 1) {
        throw DomainError("bad frame policy '" + std::string(text) + "'");
      }
      return static_cast<std::size_t>(v);
    };
    if (text == "canonical") return canonical();
    if (text.starts_with("grid:")) return grid(count_after("grid:"));
    if (text.starts_with("random:")) return random(count_after("random:"), seed);
    throw DomainError("bad frame policy '" + std::string(text) +
                      "' (expected canonical, grid:K or random:M)");
  }

  std::string str() const {
    switch (mode) {
      case Mode::canonical: return "canonical";
      case Mode::azimuthal_grid: return "grid:" + std::to_string(count);
      case Mode::random: return "random:" + std::to_string(count);
    }
    return "canonical";
  }
};

/// Frame assignments to search, in a fixed order (spin 1 outermost).
inline std::vector<FrameAssignment> candidate_frames(const DensityMatrix& rho,
                                                     const FramePolicy& policy) {
  const std::size_t n = rho.n_spins();
  std::vector<std::optional<Direction>> anchors;
  for (std::size_t j = 1; j <= n; ++j) anchors.push_back(mean_spin(rho, j).direction());

  std::vector<FrameAssignment> out;
  switch (policy.mode) {
    case FramePolicy::Mode::canonical: {
      FrameAssignment fa;
      for (const auto& a : anchors) fa.push_back(make_frame(a.value_or(policy.zero_mean_axis)));
      out.push_back(std::move(fa));
      break;
    }
    case FramePolicy::Mode::azimuthal_grid: {
      const std::size_t k = policy.count;
      std::size_t total = 1;
      for (std::size_t j = 0; j < n; ++j) total *= k;
      for (std::size_t idx = 0; idx < total; ++idx) {
        FrameAssignment fa(n, make_frame(Direction::z_axis()));
        std::size_t rest = idx;
        for (std::size_t j = n; j-- > 0;) {
          const double phi = 2.0 * std::numbers::pi * static_cast<double>(rest % k) /
                             static_cast<double>(k);
          rest /= k;
          fa[j] = make_frame(anchors[j].value_or(policy.zero_mean_axis), phi);
        }
        out.push_back(std::move(fa));
      }
      break;
    }
    case FramePolicy::Mode::random: {
      std::mt19937_64 rng(policy.seed);
      std::normal_distribution<double> gauss;
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      for (std::size_t m = 0; m < policy.count; ++m) {
        FrameAssignment fa;
        for (const auto& a : anchors) {
          Direction axis = policy.zero_mean_axis;
          if (a) {
            axis = *a;
          } else {
            double x = 0, y = 0, z = 0;
            do {
              x = gauss(rng);
              y = gauss(rng);
              z = gauss(rng);
            } while (x * x + y * y + z * z < 1e-12);
            axis = Direction::normalized(x, y, z);
          }
          fa.push_back(make_frame(axis, angle(rng)));
        }
        out.push_back(std::move(fa));
      }
      break;
    }
  }
  return out;
}

/// All choices of two axes per spin, ordered {a,b} < {a,c} < {b,c} with spin 1
/// outermost.
inline std::vector<DirectionSubset> two_axis_subsets(std::size_t n_spins) {
  static const std::array<AxisSet, 3> pairs{AxisSet::parse("ab"), AxisSet::parse("ac"),
                                            AxisSet::parse("bc")};
  std::size_t total = 1;
  for (std::size_t j = 0; j < n_spins; ++j) total *= 3;
  std::vector<DirectionSubset> out;
  for (std::size_t idx = 0; idx < total; ++idx) {
    DirectionSubset s(n_spins);
    std::size_t rest = idx;
    for (std::size_t j = n_spins; j-- > 0;) {
      s[j] = pairs[rest % 3];
      rest /= 3;
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct Witness {
  FrameAssignment frames;
  DirectionSubset subset;
  TableExtremum extremum;
};

struct MarginalWitness {
  std::vector<std::size_t> spins;
  FrameAssignment frames;
  TableExtremum extremum;
};

enum class VerdictKind { classical_separable, classical, not_identified };

inline std::string_view verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::classical_separable: return "ClassicalSeparable";
    case VerdictKind::classical: return "Classical";
    case VerdictKind::not_identified: return "NotIdentified";
  }
  return "NotIdentified";
}

struct Verdict {
  VerdictKind kind = VerdictKind::not_identified;
  /// The non-negative table that decided the verdict, or for NotIdentified
  /// the least negative two-axis table found.
  std::optional<Witness> witness;
  /// Largest full-table minimum over the candidate frames.
  Witness best_full;
  /// Largest two-axis minimum; unset when stage (i) already succeeded.
  std::optional<Witness> best_reduced;
  /// Most negative full table of any spin subset (NotIdentified only).
  std::optional<MarginalWitness> negativity_witness;
  /// Full tables of every non-empty spin subset (NotIdentified only).
  std::vector<MarginalWitness> marginals;
};

namespace detail {

struct Job {
  const FrameAssignment* frames;
  const DirectionSubset* subset;
};

struct SearchOutcome {
  std::optional<std::size_t> first_nonnegative;
  std::size_t best = 0;
  std::vector<TableExtremum> results;
};

/// Evaluates jobs in order, in batches of `workers`, stopping after the batch
/// that contains the first table with min >= -tol when `stop_early` is set.
/// Reduction is by job order, so results do not depend on scheduling.
inline SearchOutcome search(const DensityMatrix& rho, const std::vector<Job>& jobs, double tol,
                            unsigned workers, bool stop_early) {
  SearchOutcome out;
  const std::size_t batch = std::max(1U, workers);
  auto eval = [&rho](const Job& job) { return extremum(jqp_table(rho, *job.frames, *job.subset)); };
  for (std::size_t start = 0; start < jobs.size(); start += batch) {
    const std::size_t end = std::min(jobs.size(), start + batch);
    if (batch == 1) {
      out.results.push_back(eval(jobs[start]));
    } else {
      std::vector<std::future<TableExtremum>> pending;
      for (std::size_t i = start; i < end; ++i)
        pending.push_back(std::async(std::launch::async, eval, std::cref(jobs[i])));
      for (auto& f : pending) out.results.push_back(f.get());
    }
    for (std::size_t i = start; i < end; ++i) {
      if (out.results[i].min_value > out.results[out.best].min_value) out.best = i;
      if (!out.first_nonnegative && out.results[i].min_value >= -tol) out.first_nonnegative = i;
    }
    if (stop_early && out.first_nonnegative) break;
  }
  return out;
}

inline Witness make_witness(const Job& job, const TableExtremum& e) {
  return Witness{*job.frames, *job.subset, e};
}

}  // namespace detail

/// Full tables of every non-empty spin subset, obtained by summing the full
/// table over the other spins. Ordered by subset size, then lexicographically.
inline std::vector<MarginalWitness> spin_marginals(const DensityMatrix& rho,
                                                   const FrameAssignment& frames) {
  const std::size_t n = rho.n_spins();
  const JqpTable full = full_jqp_table(rho, frames);
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> spins;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (std::size_t{1} << (n - 1 - j))) spins.push_back(j + 1);
    subsets.push_back(std::move(spins));
  }
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](const auto& x, const auto& y) { return x.size() < y.size(); });
  std::vector<MarginalWitness> out;
  for (const auto& spins : subsets) {
    JqpTable t = full;
    for (std::size_t j = n; j >= 1; --j)
      if (!std::binary_search(spins.begin(), spins.end(), j)) t = marginalize_spin(t, j);
    out.push_back({spins, t.frames(), extremum(t)});
  }
  return out;
}

/// Most negative m-spin full table (m <= N) under the first candidate frame
/// assignment, if any entry is below -tol.
inline std::optional<MarginalWitness> nonclassicality_witness(const DensityMatrix& rho,
                                                              const FramePolicy& policy = {},
                                                              double tol = kClassifyTol) {
  const auto frames = candidate_frames(rho, policy).front();
  std::optional<MarginalWitness> worst;
  for (auto& m : spin_marginals(rho, frames)) {
    if (m.extremum.min_value < -tol &&
        (!worst || m.extremum.min_value < worst->extremum.min_value)) {
      worst = std::move(m);
    }
  }
  return worst;
}

inline Verdict classify(const DensityMatrix& rho, const FramePolicy& policy = {},
                        double tol = kClassifyTol, unsigned workers = 1) {
  if (!(tol >= 0.0)) throw DomainError("classify: tolerance must be non-negative");
  const auto frames = candidate_frames(rho, policy);
  const DirectionSubset full = full_subset(rho.n_spins());

  std::vector<detail::Job> stage1;
  for (const auto& fa : frames) stage1.push_back({&fa, &full});
  const auto s1 = detail::search(rho, stage1, tol, workers, true);

  Verdict v;
  v.best_full = detail::make_witness(stage1[s1.best], s1.results[s1.best]);
  if (s1.first_nonnegative) {
    v.kind = VerdictKind::classical_separable;
    v.witness = detail::make_witness(stage1[*s1.first_nonnegative], s1.results[*s1.first_nonnegative]);
    return v;
  }

  const auto subsets = two_axis_subsets(rho.n_spins());
  std::vector<detail::Job> stage2;
  for (const auto& fa : frames)
    for (const auto& s : subsets) stage2.push_back({&fa, &s});
  const auto s2 = detail::search(rho, stage2, tol, workers, true);
  v.best_reduced = detail::make_witness(stage2[s2.best], s2.results[s2.best]);
  if (s2.first_nonnegative) {
    v.kind = VerdictKind::classical;
    v.witness = detail::make_witness(stage2[*s2.first_nonnegative], s2.results[*s2.first_nonnegative]);
    return v;
  }

  v.kind = VerdictKind::not_identified;
  v.witness = v.best_reduced;
  v.marginals = spin_marginals(rho, frames.front());
  for (const auto& m : v.marginals) {
    if (m.extremum.min_value < -tol &&
        (!v.negativity_witness || m.extremum.min_value < v.negativity_witness->extremum.min_value)) {
      v.negativity_witness = m;
    }
  }
  return v;
}

/// Largest full-table minimum over the policy's frames.
inline double best_full_minimum(const DensityMatrix& rho, const FramePolicy& policy = {}) {
  double best = -INFINITY;
  for (const auto& fa : candidate_frames(rho, policy))
    best = std::max(best, extremum(full_jqp_table(rho, fa)).min_value);
  return best;
}

/// Largest two-axis minimum over the policy's frames and either all 3^N axis
/// pairs or a single fixed subset.
inline double best_reduced_minimum(const DensityMatrix& rho, const FramePolicy& policy = {},
                                   const std::optional<DirectionSubset>& only = std::nullopt) {
  const auto subsets = only ? std::vector<DirectionSubset>{*only} : two_axis_subsets(rho.n_spins());
  double best = -INFINITY;
  for (const auto& fa : candidate_frames(rho, policy))
    for (const auto& s : subsets) best = std::max(best, extremum(jqp_table(rho, fa, s)).min_value);
  return best;
}

// ---------------------------------------------------------------------------
// Partial transpose

enum class Separability { separable, entangled, inconclusive };

inline std::string_view separability_name(Separability s) {
  switch (s) {
    case Separability::separable: return "Separable";
    case Separability::entangled: return "Entangled";
    case Separability::inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

struct PptResult {
  std::vector<std::size_t> subset;
  std::vector<std::size_t> complement;
  double min_eigenvalue = 0.0;
  Separability verdict = Separability::inconclusive;
};

/// Minimum eigenvalue of rho transposed on `subset`. For two spins a
/// non-negative partial transpose is also sufficient for separability; for
/// three spins it only rules entanglement in.
inline PptResult ppt_check(const DensityMatrix& rho, std::vector<std::size_t> subset,
                           double tol = kClassifyTol) {
  const std::size_t n = rho.n_spins();
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  if (subset.empty() || subset.size() >= n) {
    throw DomainError("ppt_check: bipartition needs a non-empty proper subset of the spins");
  }
  const auto layout = rho.layout();
  ComplexMatrix pt = rho.matrix();
  for (auto s : subset) {
    layout.check_spin(s);
    pt = partial_transpose(pt, layout, s);
  }
  PptResult r;
  r.subset = subset;
  for (std::size_t j = 1; j <= n; ++j)
    if (!std::binary_search(subset.begin(), subset.end(), j)) r.complement.push_back(j);
  r.min_eigenvalue = min_eigenvalue(pt);
  if (r.min_eigenvalue < -tol) {
    r.verdict = Separability::entangled;
  } else {
    r.verdict = n == 2 ? Separability::separable : Separability::inconclusive;
  }
  return r;
}

/// One check per bipartition (the side not containing the last spin is
/// transposed).
inline std::vector<PptResult> ppt_all(const DensityMatrix& rho, double tol = kClassifyTol) {
  const std::size_t n = rho.n_spins();
  std::vector<PptResult> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << (n - 1)); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t j = 0; j + 1 < n; ++j)
      if (mask & (std::size_t{1} << j)) subset.push_back(j + 1);
    out.push_back(ppt_check(rho, subset, tol));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Threshold bisection

enum class ScanTarget { part_i, part_ii, ppt };

inline std::string_view target_name(ScanTarget t) {
  switch (t) {
    case ScanTarget::part_i: return "part_i";
    case ScanTarget::part_ii: return "part_ii";
    case ScanTarget::ppt: return "ppt";
  }
  return "part_i";
}

inline ScanTarget parse_target(std::string_view s) {
  if (s == "part_i") return ScanTarget::part_i;
  if (s == "part_ii") return ScanTarget::part_ii;
  if (s == "ppt") return ScanTarget::ppt;
  throw DomainError("unknown scan target '" + std::string(s) + "' (part_i, part_ii, ppt)");
}

struct ScanOptions {
  FramePolicy policy;
  /// Restricts part_ii to one axis choice instead of all 3^N.
  std::optional<DirectionSubset> subset;
  double tol = 1e-9;
  /// Monitored values at or above -noise_floor count as non-negative. This is
  /// a rounding allowance only; the classification tolerance would shift the
  /// located root by tol / slope.
  double noise_floor = 1e-13;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double critical = 0.0;
  double value_lo = 0.0;
  double value_hi = 0.0;
};

/// Bisects the point where monitor(t) changes between >= -noise and < -noise.
inline Bracket bisect_sign_change(const std::function<double(double)>& monitor, double lo,
                                  double hi, double tol = 1e-9, double noise = 1e-13) {
  if (!(lo < hi)) throw DomainError("bisection range must satisfy lo < hi");
  if (!(tol > 0.0)) throw DomainError("bisection tolerance must be positive");
  Bracket b{lo, hi, 0.0, monitor(lo), monitor(hi)};
  const bool lo_side = b.value_lo >= -noise;
  if (lo_side == (b.value_hi >= -noise)) {
    throw BracketError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "]: monitored values " + std::to_string(b.value_lo) + " and " +
                       std::to_string(b.value_hi));
  }
  while (b.hi - b.lo > tol) {
    const double mid = 0.5 * (b.lo + b.hi);
    const double v = monitor(mid);
    if ((v >= -noise) == lo_side) {
      b.lo = mid;
      b.value_lo = v;
    } else {
      b.hi = mid;
      b.value_hi = v;
    }
  }
  b.critical = 0.5 * (b.lo + b.hi);
  return b;
}

/// Quantity whose sign decides the target: best full-table minimum (part_i),
/// best two-axis minimum (part_ii) or smallest partial-transpose eigenvalue
/// over all bipartitions (ppt).
inline double monitored_value(const DensityMatrix& rho, ScanTarget target,
                              const ScanOptions& opts = {}) {
  switch (target) {
    case ScanTarget::part_i: return best_full_minimum(rho, opts.policy);
    case ScanTarget::part_ii: return best_reduced_minimum(rho, opts.policy, opts.subset);
    case ScanTarget::ppt: {
      double worst = INFINITY;
      for (const auto& r : ppt_all(rho)) worst = std::min(worst, r.min_eigenvalue);
      return worst;
    }
  }
  return 0.0;
}

struct ThresholdResult {
  std::string parameter;
  double critical_value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  ScanTarget target = ScanTarget::part_i;
};

inline ThresholdResult threshold_scan(const StateSpec& family, const std::string& parameter,
                                      double lo, double hi, ScanTarget target,
                                      const ScanOptions& opts = {}) {
  if (family.family == Family::raw) throw DomainError("threshold_scan: raw states have no parameters");
  auto monitor = [&](double t) { return monitored_value(build_state(family.with(parameter, t)), target, opts); };
  const Bracket b = bisect_sign_change(monitor, lo, hi, opts.tol, opts.noise_floor);
  return {parameter, b.critical, b.lo, b.hi, target};
}

}  // namespace jqp
