// Acceptance checks AC1..AC8. One PASS/FAIL line per criterion, preceded by
// the individual checks. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jqp/classify.hpp"
#include "jqp/jqp.hpp"
#include "jqp/states.hpp"

namespace {

using namespace jqp;

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}

  void check(bool ok, const std::string& what) {
    std::printf("    [%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
    ok_ = ok_ && ok;
  }

  void near(double actual, double expected, double tol, const std::string& what) {
    const double err = std::abs(actual - expected);
    char buf[160];
    std::snprintf(buf, sizeof buf, ": got %.15g, expected %.15g (|err| %.2e, tol %.0e)", actual, expected, err, tol);
    check(err <= tol, what + buf);
  }

  void note(const std::string& text) const { std::printf("    note: %s\n", text.c_str()); }

  // Runs body, turning any exception into a failed check.
  void guard(const std::string& what, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      check(false, what + ": " + e.what());
    }
  }

  bool finish() const {
    std::printf("%s %s\n", name_.c_str(), ok_ ? "PASS" : "FAIL");
    return ok_;
  }

 private:
  std::string name_;
  bool ok_ = true;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

AxisSet ax(const char* s) { return AxisSet::parse(s); }

FrameAssignment canonical_frames(const DensityMatrix& rho) {
  return candidate_frames(rho, FramePolicy::canonical()).front();
}

double full_min(const DensityMatrix& rho) { return extremum(full_jqp_table(rho, canonical_frames(rho))).min_value; }

double subset_min(const DensityMatrix& rho, const DirectionSubset& s) {
  return extremum(jqp_table(rho, canonical_frames(rho), s)).min_value;
}

double ppt_min(const DensityMatrix& rho) { return monitored_value(rho, ScanTarget::ppt); }

StateSpec spec(Family f, std::map<std::string, double> params) {
  StateSpec s;
  s.family = f;
  s.params = std::move(params);
  return s;
}

// --- generators -------------------------------------------------------------

std::mt19937_64& rng() {
  static std::mt19937_64 engine(0x6a717031);
  return engine;
}

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

Direction random_direction() {
  std::normal_distribution<double> g;
  for (;;) {
    const double x = g(rng()), y = g(rng()), z = g(rng());
    if (x * x + y * y + z * z > 1e-8) return Direction::normalized(x, y, z);
  }
}

Frame random_frame() { return make_frame(random_direction(), uniform(0.0, 2.0 * std::numbers::pi)); }

FrameAssignment random_frames(std::size_t n) {
  FrameAssignment out;
  for (std::size_t j = 0; j < n; ++j) out.push_back(random_frame());
  return out;
}

DensityMatrix random_state(std::size_t n) {
  std::normal_distribution<double> g;
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix a(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) a(r, c) = Complex{g(rng()), g(rng())};
  ComplexMatrix m = a * a.adjoint();
  m *= 1.0 / trace(m).real();
  return DensityMatrix::validate(std::move(m), n);
}

DirectionSubset random_subset(std::size_t n) {
  DirectionSubset s;
  for (std::size_t j = 0; j < n; ++j) {
    AxisSet a = AxisSet::full();
    for (Axis u : kAxes)
      if (uniform(0.0, 1.0) < 0.3) a = a.without(u);
    s.push_back(a);
  }
  return s;
}

std::array<double, 3> random_bloch(double radius) {
  const Direction d = random_direction();
  return {radius * d.x(), radius * d.y(), radius * d.z()};
}

// --- criteria ---------------------------------------------------------------

bool ac1() {
  Criterion ac("AC1");
  double full_err = 0.0, reduced_err = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double x = 0.1 * k;
    const auto rho = werner(x);
    full_err = std::max(full_err, std::abs(full_min(rho) - (1 - 3 * x) / 64));
    reduced_err = std::max(reduced_err, std::abs(subset_min(rho, {ax("ab"), ax("ab")}) - (1 - 2 * x) / 16));
  }
  ac.check(full_err <= 1e-12, fmt("full-table minimum (1-3x)/64 on x = 0..1: max err %.2e", full_err));
  ac.check(reduced_err <= 1e-12, fmt("{a,b}-reduced minimum (1-2x)/16 on x = 0..1: max err %.2e", reduced_err));

  const auto family = spec(Family::werner, {});
  ac.guard("part_i scan", [&] {
    ac.near(threshold_scan(family, "x", 0, 1, ScanTarget::part_i).critical_value, 1.0 / 3, 1e-9, "part_i threshold");
  });
  ac.guard("part_ii threshold scan over all two-axis subsets", [&] {
    ac.near(threshold_scan(family, "x", 0, 1, ScanTarget::part_ii).critical_value, 0.5, 1e-9,
            "part_ii threshold");
  });
  ac.note(fmt("best two-axis minimum at x = 1 is %.6g; mixed pairs such as {ab,ac} give (1-x)/16 >= 0",
              monitored_value(werner(1.0), ScanTarget::part_ii)));
  ScanOptions same;
  same.subset = DirectionSubset{ax("ab"), ax("ab")};
  ac.note(fmt("restricted to {ab,ab} the part_ii threshold is %.12g",
              threshold_scan(family, "x", 0, 1, ScanTarget::part_ii, same).critical_value));
  ac.guard("ppt scan", [&] {
    ac.near(threshold_scan(family, "x", 0, 1, ScanTarget::ppt).critical_value, 1.0 / 3, 1e-6, "PPT threshold");
  });
  return ac.finish();
}

bool ac2() {
  Criterion ac("AC2");
  double err = 0.0;
  bool cls_ok = true, ppt_ok = true;
  for (int k = 0; k <= 20; ++k) {
    const double x = 0.05 * k;
    const auto rho = peres_mix(x);
    err = std::max(err, std::abs(full_min(rho) - (-x / 32)));
    cls_ok = cls_ok && ((classify(rho).kind == VerdictKind::classical_separable) == (k == 0));
    ppt_ok = ppt_ok && ((ppt_check(rho, {1}, 1e-10).verdict == Separability::separable) == (k == 0));
  }
  ac.check(err <= 1e-12, fmt("full-table minimum -x/32 on x = 0..1 step 0.05: max err %.2e", err));
  ac.check(cls_ok, "ClassicalSeparable iff x = 0");
  ac.check(ppt_ok, "PPT Separable iff x = 0");
  return ac.finish();
}

bool ac3() {
  Criterion ac("AC3");
  // Products (εa ε'a, εb ε'b, εc ε'c) picking out (1 - 2 x_i)/32.
  const std::array<std::array<int, 3>, 4> patterns{{{1, 1, 1}, {1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}}};
  const std::vector<std::array<double, 4>> sample{
      {1, 0, 0, 0},           {0, 1, 0, 0},          {0, 0, 1, 0},         {0, 0, 0, 1},
      {0.25, 0.25, 0.25, 0.25}, {0.5, 0.5, 0, 0},    {0.5, 0, 0.5, 0},     {0.5, 0, 0, 0.5},
      {0, 0.5, 0.5, 0},       {0, 0.5, 0, 0.5},      {0, 0, 0.5, 0.5},     {0.7, 0.1, 0.1, 0.1},
      {0.1, 0.7, 0.1, 0.1},   {0.1, 0.1, 0.7, 0.1},  {0.1, 0.1, 0.1, 0.7}, {0.4, 0.3, 0.2, 0.1},
      {0.1, 0.2, 0.3, 0.4},   {0.5, 0.25, 0.25, 0},  {0.05, 0.51, 0.24, 0.2}, {0.3, 0.3, 0.3, 0.1}};
  double err = 0.0;
  std::size_t checked = 0;
  bool cls_ok = true, ppt_ok = true;
  for (const auto& w : sample) {
    const auto rho = bell_diagonal(w);
    const auto t = full_jqp_table(rho, canonical_frames(rho));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto s = t.assignment(i);
      for (std::size_t p = 0; p < 4; ++p) {
        bool match = true;
        for (Axis u : kAxes) match = match && s.sign(0, u) * s.sign(1, u) == patterns[p][static_cast<std::size_t>(u)];
        if (match) {
          err = std::max(err, std::abs(t.value(i) - (1 - 2 * w[p]) / 32));
          ++checked;
        }
      }
    }
    const double wmax = *std::max_element(w.begin(), w.end());
    const bool expect_sep = wmax <= 0.5 + kClassifyTol;
    cls_ok = cls_ok && (classify(rho).kind == VerdictKind::classical_separable) == expect_sep;
    ppt_ok = ppt_ok && (ppt_check(rho, {1}).verdict == Separability::separable) == expect_sep;
  }
  ac.check(checked == sample.size() * 32 && err <= 1e-12,
           fmt("sign patterns give (1-2x_i)/32 on %g entries: max err %.2e", static_cast<double>(checked), err));
  ac.check(cls_ok, "ClassicalSeparable iff max x_i <= 1/2 on 20 simplex points");
  ac.check(ppt_ok, "PPT agrees at every sampled point");
  return ac.finish();
}

bool ac4() {
  Criterion ac("AC4");
  const double r = 1.0 / std::sqrt(2.0);
  ac.guard("part_i scan", [&] {
    ac.near(threshold_scan(spec(Family::gisin, {{"alpha", r}}), "x", 0, 1, ScanTarget::part_i).critical_value, 0.5,
            1e-9, "part_i threshold at alpha = 1/sqrt2");
  });
  ac.guard("{bc,bc} scan", [&] {
    ScanOptions opts;
    opts.subset = DirectionSubset{ax("bc"), ax("bc")};
    ac.near(threshold_scan(spec(Family::gisin, {{"alpha", 0.6}}), "x", 0, 1, ScanTarget::part_ii, opts).critical_value,
            0.520833333, 1e-9, "{b,c}x{b,c} threshold at alpha = 0.6");
  });
  for (double alpha : {0.3, 0.6, r}) {
    const double beta = std::sqrt(1 - alpha * alpha);
    ac.guard("ppt scan", [&] {
      ac.near(threshold_scan(spec(Family::gisin, {{"alpha", alpha}}), "x", 0, 1, ScanTarget::ppt).critical_value,
              1 / (1 + 2 * alpha * beta), 1e-6, fmt("PPT threshold at alpha = %.6g", alpha));
    });
  }
  std::size_t separable = 0;
  bool contained = true;
  for (double alpha : {0.3, 0.6, r}) {
    for (int k = 0; k <= 40; ++k) {
      const auto rho = gisin(0.025 * k, alpha);
      if (ppt_check(rho, {1}).verdict != Separability::separable) continue;
      ++separable;
      contained = contained && classify(rho).kind != VerdictKind::not_identified;
    }
  }
  ac.check(contained, fmt("all %g PPT-separable sampled points are Classical or ClassicalSeparable",
                          static_cast<double>(separable)));
  return ac.finish();
}

bool ac5() {
  Criterion ac("AC5");
  const double r = 1.0 / std::sqrt(2.0);
  for (double alpha : {0.3, 0.6, r, 0.9}) {
    const auto rho = horodecki_mix(0.5, alpha);
    const auto kind = classify(rho).kind;
    const bool balanced = std::abs(alpha - r) < 1e-12;
    const bool ok = kind == VerdictKind::classical || (balanced && kind == VerdictKind::classical_separable);
    ac.check(ok, fmt("x = 1/2, alpha = %.6g: ", alpha) + std::string(verdict_name(kind)));
    const double m = subset_min(rho, {ax("bc"), ax("ac")});
    ac.check(m >= -kClassifyTol, fmt("x = 1/2, alpha = %.6g: {b,c}x{a,c} minimum %.6g >= 0", alpha, m));
  }
  for (double x : {0.3, 0.7}) {
    const auto rho = horodecki_mix(x, 0.6);
    const auto v = classify(rho);
    ac.check(v.kind == VerdictKind::not_identified,
             fmt("x = %.1f, alpha = 0.6: verdict ", x) + std::string(verdict_name(v.kind)));
    if (v.witness) {
      ac.note("deciding table " + subset_str(v.witness->subset) + fmt(" has minimum %.6g", v.witness->extremum.min_value));
    }
    ac.check(ppt_check(rho, {1}).verdict == Separability::entangled,
             fmt("x = %.1f, alpha = 0.6: PPT minimum eigenvalue %.6g < 0", x, ppt_min(rho)));
  }
  return ac.finish();
}

bool ac6() {
  Criterion ac("AC6");
  double err = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double c = -2.0 / 3 + k * (2.0 / 20);
    const auto rho = toth_acin(c);
    const auto t = full_jqp_table(rho, canonical_frames(rho));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto s = t.assignment(i);
      auto dot = [&](std::size_t p, std::size_t q) {
        double acc = 0;
        for (Axis u : kAxes) acc += s.sign(p, u) * s.sign(q, u);
        return acc;
      };
      const double expected = (1 + dot(1, 2) / 3 - c / 2 * (dot(0, 1) + dot(0, 2))) / 512;
      err = std::max(err, std::abs(t.value(i) - expected));
    }
  }
  ac.check(err <= 1e-12, fmt("3-spin table on c = -2/3..4/3 (21 points): max err %.2e", err));
  const auto family = spec(Family::toth_acin, {});
  ac.guard("part_i scan", [&] {
    ac.near(threshold_scan(family, "c", 0, 4.0 / 3, ScanTarget::part_i).critical_value, 2.0 / 3, 1e-9,
            "part_i threshold");
  });
  ac.guard("part_ii scan", [&] {
    ScanOptions opts;
    opts.subset = DirectionSubset{ax("bc"), ax("ab"), ax("ab")};
    ac.near(threshold_scan(family, "c", 0, 4.0 / 3, ScanTarget::part_ii, opts).critical_value, 1.0, 1e-9,
            "part_ii threshold for {b,c};{a,b};{a,b}");
  });

  auto marginal = [](double c) {
    const auto rho = toth_acin(c);
    const auto f = canonical_frames(rho);
    return full_jqp_table(reduce(rho, {1, 2}), {f[0], f[1]});
  };
  double merr = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double c = -2.0 / 3 + k * (2.0 / 20);
    const auto t = marginal(c);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto s = t.assignment(i);
      double d = 0;
      for (Axis u : kAxes) d += s.sign(0, u) * s.sign(1, u);
      merr = std::max(merr, std::abs(t.value(i) - (1 - c / 2 * d) / 64));
    }
  }
  ac.check(merr <= 1e-12, fmt("{1,2} marginal table: max err %.2e", merr));
  ac.guard("marginal scan", [&] {
    const auto b = bisect_sign_change([&](double c) { return extremum(marginal(c)).min_value; }, 0, 4.0 / 3);
    ac.near(b.critical, 2.0 / 3, 1e-9, "{1,2} marginal non-negativity threshold");
  });
  return ac.finish();
}

bool ac7() {
  Criterion ac("AC7");
  const double tol = 1e-12;

  {
    double norm = 0, imag = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
      const auto t = jqp_table(random_state(n), random_frames(n), random_subset(n));
      norm = std::max(norm, std::abs(t.total() - 1.0));
      imag = std::max(imag, t.max_imag_residue());
    }
    ac.check(norm <= tol, fmt("normalization, 300 random tables: max |sum - 1| %.2e", norm));
    ac.check(imag <= tol, fmt("realness, 300 random tables: max imaginary residue %.2e", imag));
  }
  {
    double err = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
      const auto rho = random_state(n);
      const auto frames = random_frames(n);
      const auto subset = random_subset(n);
      const auto t = jqp_table(rho, frames, subset);
      for (std::size_t j = 1; j <= n; ++j)
        for (Axis u : subset[j - 1].axes()) {
          const auto m = marginalize_direction(t, j, u);
          auto smaller = subset;
          smaller[j - 1] = smaller[j - 1].without(u);
          const auto d = jqp_table(rho, frames, smaller);
          for (std::size_t i = 0; i < m.size(); ++i) err = std::max(err, std::abs(m.value(i) - d.value(i)));
        }
    }
    ac.check(err <= tol, fmt("direction marginalization, 100 states: max err %.2e", err));
  }
  {
    double err = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
      const auto rho = random_state(n);
      const auto frames = random_frames(n);
      const auto subset = random_subset(n);
      const auto t = jqp_table(rho, frames, subset);
      for (std::size_t drop = 1; drop <= n; ++drop) {
        std::vector<std::size_t> keep;
        FrameAssignment kf;
        DirectionSubset ks;
        for (std::size_t j = 1; j <= n; ++j)
          if (j != drop) {
            keep.push_back(j);
            kf.push_back(frames[j - 1]);
            ks.push_back(subset[j - 1]);
          }
        const auto m = marginalize_spin(t, drop);
        const auto d = jqp_table(reduce(rho, keep), kf, ks);
        for (std::size_t i = 0; i < m.size(); ++i) err = std::max(err, std::abs(m.value(i) - d.value(i)));
      }
    }
    ac.check(err <= tol, fmt("spin marginalization, 100 states: max err %.2e", err));
  }
  {
    double err = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
      const auto rho = random_state(n);
      const auto frames = random_frames(n);
      const auto subset = full_subset(n);
      const auto t = jqp_table(rho, frames, subset);
      const std::size_t j = static_cast<std::size_t>(trial) % n;
      const Axis u = kAxes[static_cast<std::size_t>(trial / 3) % 3];
      auto flipped = frames;
      flipped[j] = frames[j].flipped(u);
      const auto f = jqp_table(rho, flipped, subset);
      for (std::size_t i = 0; i < t.size(); ++i) {
        auto s = t.assignment(i);
        s.signs[j][static_cast<std::size_t>(u)] *= -1;
        err = std::max(err, std::abs(f.at(s) - t.value(i)));
      }
    }
    ac.check(err <= tol, fmt("axis-flip covariance, 100 tables: max err %.2e", err));
  }
  {
    double err = 0, worst = INFINITY;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
      std::vector<std::array<double, 3>> bloch;
      for (std::size_t j = 0; j < n; ++j) bloch.push_back(random_bloch(std::cbrt(uniform(0.0, 1.0))));
      const auto rho = product_state(bloch);
      const auto frames = random_frames(n);
      const auto t = full_jqp_table(rho, frames);
      std::vector<JqpTable> singles;
      for (std::size_t j = 0; j < n; ++j)
        singles.push_back(full_jqp_table(product_state(std::vector{bloch[j]}), {frames[j]}));
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto s = t.assignment(i);
        double prod = 1;
        for (std::size_t j = 0; j < n; ++j) prod *= singles[j].at(SignAssignment{{s.signs[j]}});
        err = std::max(err, std::abs(t.value(i) - prod));
      }
      const auto cf = canonical_frames(rho);
      worst = std::min(worst, extremum(full_jqp_table(rho, cf)).min_value);
    }
    ac.check(err <= tol, fmt("product-state factorization, 100 states: max err %.2e", err));
    ac.check(worst >= -tol, fmt("product states in mean frames are non-negative: min entry %.3g", worst));
  }
  {
    double worst = INFINITY;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto rho = trial % 2 ? random_state(1) : product_state(std::vector{random_bloch(std::cbrt(uniform(0, 1)))});
      worst = std::min(worst, full_min(rho));
    }
    ac.check(worst >= -tol, fmt("single-spin tables in the mean frame, 1000 states: min entry %.3g", worst));
  }
  {
    auto sym_factor = [](const Frame& f, const std::array<int, 3>& eps) {
      const ComplexMatrix id = ComplexMatrix::identity(2);
      std::array<ComplexMatrix, 3> s{static_cast<double>(eps[0]) * spin_component(f.a),
                                     static_cast<double>(eps[1]) * spin_component(f.b),
                                     static_cast<double>(eps[2]) * spin_component(f.c)};
      return 0.125 * id + 0.25 * (s[0] + s[1] + s[2]) +
             0.5 * (symmetrize2(s[0], s[1]) + symmetrize2(s[0], s[2]) + symmetrize2(s[1], s[2])) +
             symmetrize3(s[0], s[1], s[2]);
    };
    double err = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto rho = random_state(2);
      const auto frames = random_frames(2);
      const auto t = full_jqp_table(rho, frames);
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto s = t.assignment(i);
        const auto op = kron(sym_factor(frames[0], s.signs[0]), sym_factor(frames[1], s.signs[1]));
        err = std::max(err, std::abs(rho.expectation(op).real() - t.value(i)));
      }
    }
    ac.check(err <= tol, fmt("symmetric-ordering expansion vs affine table, 100 states: max err %.2e", err));
  }
  {
    const Complex i{0.0, 1.0};
    double comm = 0, anti = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Direction u = random_direction();
      const Direction v = random_direction();
      const auto w = u.cross(v);
      const ComplexMatrix sw = 0.5 * (w[0] * pauli_x() + w[1] * pauli_y() + w[2] * pauli_z());
      const auto su = spin_component(u);
      const auto sv = spin_component(v);
      comm = std::max(comm, max_abs_diff(su * sv - sv * su, i * sw));
      anti = std::max(anti, max_abs_diff(su * sv + sv * su, (u.dot(v) / 2) * ComplexMatrix::identity(2)));
    }
    ac.check(comm <= tol, fmt("[S_u, S_v] = i S_{u x v}, 1000 pairs: max err %.2e", comm));
    ac.check(anti <= tol, fmt("{S_u, S_v} = (u.v)/2, 1000 pairs: max err %.2e", anti));
  }
  return ac.finish();
}

bool ac8() {
  Criterion ac("AC8");
  const double singlet = full_min(werner(1.0));
  ac.check(singlet < -kClassifyTol, fmt("singlet full-table minimum %.6g < 0", singlet));
  const double pure = full_min(gisin(1.0, 0.6));
  ac.check(pure < -kClassifyTol, fmt("gisin(1, 0.6) full-table minimum %.6g < 0", pure));
  double worst = INFINITY;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    std::vector<std::array<double, 3>> bloch;
    for (std::size_t j = 0; j < n; ++j) bloch.push_back(random_bloch(1.0));
    worst = std::min(worst, full_min(product_state(bloch)));
  }
  ac.check(worst >= -kClassifyTol, fmt("300 spin-coherent products: min entry %.3g", worst));
  return ac.finish();
}

}  // namespace

int main() {
  int failed = 0;
  for (auto* run : {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8}) failed += run() ? 0 : 1;
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
