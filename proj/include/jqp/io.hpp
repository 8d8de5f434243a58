#pragma once

// JSON request/report documents and CSV table dumps for the command-line
// front end. Numbers are written with 15 significant digits.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "jqp/classify.hpp"
#include "jqp/density_matrix.hpp"
#include "jqp/errors.hpp"
#include "jqp/jqp.hpp"
#include "jqp/states.hpp"

namespace jqp::io {

using json = nlohmann::json;

/// The request could not be understood (as opposed to describing an invalid
/// state).
struct MalformedInput : Error {
  using Error::Error;
};

inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 15);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

/// Value nearest to v that survives a 15-significant-digit round trip.
inline double round15(double v) {
  if (!std::isfinite(v)) return v;
  const std::string s = format_number(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

struct Outputs {
  bool verdict = true;
  bool tables = false;
  bool ppt = true;
  bool witnesses = true;
  bool matrix = false;
};

struct AnalysisRequest {
  StateSpec state;
  FramePolicy policy;
  double tolerance = kClassifyTol;
  Outputs outputs;
  std::optional<std::vector<Frame>> frames;
  std::optional<DirectionSubset> subset;
};

inline double default_tolerance() {
  if (const char* env = std::getenv("JQP_DEFAULT_TOL")) {
    double v = 0.0;
    const std::string s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !(v >= 0.0)) {
      throw MalformedInput("JQP_DEFAULT_TOL is not a non-negative number: '" + s + "'");
    }
    return v;
  }
  return kClassifyTol;
}

namespace detail {

inline double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw MalformedInput(what + " must be a number");
  return j.get<double>();
}

inline Direction direction_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw MalformedInput(what + " must be a 3-vector");
  try {
    return Direction::unit(number(j[0], what), number(j[1], what), number(j[2], what));
  } catch (const DomainError& e) {
    throw MalformedInput(what + ": " + e.what());
  }
}

}  // namespace detail

inline StateSpec parse_state(const json& j) {
  if (!j.is_object()) throw MalformedInput("state must be an object");
  if (!j.contains("family") || !j["family"].is_string()) {
    throw MalformedInput("state needs a string 'family'");
  }
  const auto name = j["family"].get<std::string>();
  const auto family = family_from_name(name);
  if (!family) throw MalformedInput("unknown state family '" + name + "'");

  StateSpec spec;
  spec.family = *family;
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw MalformedInput("params must be an object");
    for (const auto& [k, v] : j["params"].items()) spec.params[k] = detail::number(v, "param " + k);
  }
  if (spec.family == Family::raw) {
    if (!j.contains("matrix") || !j["matrix"].is_array()) {
      throw MalformedInput("raw state needs 'matrix' as nested [re, im] pairs");
    }
    const auto& rows = j["matrix"];
    const std::size_t dim = rows.size();
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != dim) throw MalformedInput("raw matrix must be square");
      for (const auto& z : row) {
        if (!z.is_array() || z.size() != 2) throw MalformedInput("matrix entries must be [re, im] pairs");
        spec.raw_entries.emplace_back(detail::number(z[0], "matrix entry"),
                                      detail::number(z[1], "matrix entry"));
      }
    }
    if (j.contains("n_spins")) {
      if (!j["n_spins"].is_number_unsigned()) throw MalformedInput("n_spins must be a positive integer");
      spec.raw_n_spins = j["n_spins"].get<std::size_t>();
    } else {
      std::size_t n = 0;
      while ((std::size_t{1} << n) < dim) ++n;
      spec.raw_n_spins = n;
    }
  }
  return spec;
}

inline json state_to_json(const StateSpec& spec) {
  json j;
  j["family"] = std::string(family_name(spec.family));
  if (spec.family == Family::raw) {
    j["n_spins"] = spec.raw_n_spins;
    const std::size_t dim = std::size_t{1} << spec.raw_n_spins;
    json rows = json::array();
    for (std::size_t r = 0; r < dim; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < dim; ++c) {
        const Complex z = spec.raw_entries.at(r * dim + c);
        row.push_back({round15(z.real()), round15(z.imag())});
      }
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
  } else {
    j["params"] = json::object();
    for (const auto& [k, v] : spec.params) j["params"][k] = v;
  }
  return j;
}

/// Raw-matrix spec for an already built state.
inline StateSpec raw_spec(const DensityMatrix& rho) {
  StateSpec s;
  s.family = Family::raw;
  s.raw_n_spins = rho.n_spins();
  auto e = rho.matrix().entries();
  s.raw_entries.assign(e.begin(), e.end());
  return s;
}

inline json frame_to_json(const Frame& f) {
  auto vec = [](const Direction& d) {
    return json::array({round15(d.x()), round15(d.y()), round15(d.z())});
  };
  return {{"a", vec(f.a)}, {"b", vec(f.b)}, {"c", vec(f.c)}};
}

inline Frame frame_from_json(const json& j) {
  if (!j.is_object()) throw MalformedInput("frame must be an object with a, b, c");
  for (const char* k : {"a", "b", "c"})
    if (!j.contains(k)) throw MalformedInput(std::string("frame is missing axis ") + k);
  Frame f{detail::direction_from(j["a"], "frame axis a"), detail::direction_from(j["b"], "frame axis b"),
          detail::direction_from(j["c"], "frame axis c")};
  if (f.orthogonality_error() > kUnitTol) throw MalformedInput("frame axes are not orthogonal");
  return f;
}

namespace detail {

inline AnalysisRequest parse_request_fields(const json& j);

}  // namespace detail

/// Request document, or a bare state object (anything with "family").
inline AnalysisRequest parse_request(const json& j) {
  try {
    return detail::parse_request_fields(j);
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("malformed request: ") + e.what());
  }
}

inline AnalysisRequest detail::parse_request_fields(const json& j) {
  if (!j.is_object()) throw MalformedInput("request must be a JSON object");
  AnalysisRequest req;
  req.tolerance = default_tolerance();
  if (j.contains("family")) {
    req.state = parse_state(j);
    return req;
  }
  if (!j.contains("state")) throw MalformedInput("request needs a 'state'");
  req.state = parse_state(j["state"]);
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  if (j.contains("policy")) {
    if (!j["policy"].is_string()) throw MalformedInput("policy must be a string");
    try {
      req.policy = FramePolicy::parse(j["policy"].get<std::string>(), seed);
    } catch (const DomainError& e) {
      throw MalformedInput(e.what());
    }
  }
  if (j.contains("tolerance")) {
    req.tolerance = detail::number(j["tolerance"], "tolerance");
    if (!(req.tolerance >= 0.0)) throw MalformedInput("tolerance must be non-negative");
  }
  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    if (!o.is_object()) throw MalformedInput("outputs must be an object");
    req.outputs.verdict = o.value("verdict", req.outputs.verdict);
    req.outputs.tables = o.value("tables", req.outputs.tables);
    req.outputs.ppt = o.value("ppt", req.outputs.ppt);
    req.outputs.witnesses = o.value("witnesses", req.outputs.witnesses);
    req.outputs.matrix = o.value("matrix", req.outputs.matrix);
  }
  if (j.contains("frames")) {
    if (!j["frames"].is_array()) throw MalformedInput("frames must be an array, one frame per spin");
    std::vector<Frame> frames;
    for (const auto& f : j["frames"]) frames.push_back(frame_from_json(f));
    req.frames = std::move(frames);
  }
  if (j.contains("subset")) {
    if (!j["subset"].is_array()) throw MalformedInput("subset must be an array, one entry per spin");
    DirectionSubset s;
    for (const auto& item : j["subset"]) {
      if (!item.is_string()) throw MalformedInput("subset entries are strings like \"ab\"");
      try {
        s.push_back(AxisSet::parse(item.get<std::string>()));
      } catch (const DomainError& e) {
        throw MalformedInput(e.what());
      }
    }
    req.subset = std::move(s);
  }
  return req;
}

inline json request_to_json(const AnalysisRequest& req) {
  json j;
  j["state"] = state_to_json(req.state);
  j["policy"] = req.policy.str();
  j["seed"] = req.policy.seed;
  j["tolerance"] = req.tolerance;
  j["outputs"] = {{"verdict", req.outputs.verdict},
                  {"tables", req.outputs.tables},
                  {"ppt", req.outputs.ppt},
                  {"witnesses", req.outputs.witnesses},
                  {"matrix", req.outputs.matrix}};
  if (req.frames) {
    j["frames"] = json::array();
    for (const auto& f : *req.frames) j["frames"].push_back(frame_to_json(f));
  }
  if (req.subset) {
    j["subset"] = json::array();
    for (auto s : *req.subset) j["subset"].push_back(s.str());
  }
  return j;
}

/// "+-+;--" style: one character per included axis, spins separated by ';'.
inline std::string signs_str(const DirectionSubset& subset, const SignAssignment& s) {
  std::string out;
  for (std::size_t j = 0; j < subset.size(); ++j) {
    if (j) out += ';';
    for (Axis u : subset[j].axes()) out += s.sign(j, u) > 0 ? '+' : '-';
  }
  return out;
}

inline json extremum_to_json(const DirectionSubset& subset, const TableExtremum& e) {
  return {{"min", round15(e.min_value)}, {"argmin", signs_str(subset, e.argmin)}};
}

inline json witness_to_json(const Witness& w) {
  json j = extremum_to_json(w.subset, w.extremum);
  j["subset"] = subset_str(w.subset);
  j["frames"] = json::array();
  for (const auto& f : w.frames) j["frames"].push_back(frame_to_json(f));
  return j;
}

inline json marginal_to_json(const MarginalWitness& m) {
  const DirectionSubset subset = full_subset(m.spins.size());
  json j = extremum_to_json(subset, m.extremum);
  j["spins"] = m.spins;
  return j;
}

inline json table_to_json(const JqpTable& t) {
  json j;
  j["subset"] = subset_str(t.subset());
  j["frames"] = json::array();
  for (const auto& f : t.frames()) j["frames"].push_back(frame_to_json(f));
  j["rows"] = json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    j["rows"].push_back({{"signs", signs_str(t.subset(), t.assignment(i))}, {"p", round15(t.value(i))}});
  }
  return j;
}

/// Header e1_a,e1_b,...,p then one row per sign assignment with ±1 columns.
inline std::string table_to_csv(const JqpTable& t) {
  std::ostringstream os;
  for (std::size_t j = 0; j < t.n_spins(); ++j)
    for (Axis u : t.subset()[j].axes()) os << 'e' << (j + 1) << '_' << axis_name(u) << ',';
  os << "p\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto s = t.assignment(i);
    for (std::size_t j = 0; j < t.n_spins(); ++j)
      for (Axis u : t.subset()[j].axes()) os << (s.sign(j, u) > 0 ? "1" : "-1") << ',';
    os << format_number(t.value(i)) << '\n';
  }
  return os.str();
}

inline json ppt_to_json(const PptResult& r) {
  return {{"subset", r.subset},
          {"complement", r.complement},
          {"min_eigenvalue", round15(r.min_eigenvalue)},
          {"verdict", std::string(separability_name(r.verdict))}};
}

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) row.push_back({round15(m(r, c).real()), round15(m(r, c).imag())});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline int exit_code_for(VerdictKind k) {
  switch (k) {
    case VerdictKind::classical_separable: return 0;
    case VerdictKind::classical: return 1;
    case VerdictKind::not_identified: return 2;
  }
  return 2;
}

struct Report {
  json document;
  int exit_code = 0;
};

inline void check_request_shape(const AnalysisRequest& req, std::size_t n_spins) {
  if (req.frames && req.frames->size() != n_spins) {
    throw MalformedInput("request gives " + std::to_string(req.frames->size()) + " frames for " +
                         std::to_string(n_spins) + " spins");
  }
  if (req.subset && req.subset->size() != n_spins) {
    throw MalformedInput("request gives " + std::to_string(req.subset->size()) + " subset entries for " +
                         std::to_string(n_spins) + " spins");
  }
}

/// Runs classify (and the partial-transpose checks) for a request.
inline Report analyze(const AnalysisRequest& req, unsigned workers = 1) {
  const DensityMatrix rho = build_state(req.state);
  check_request_shape(req, rho.n_spins());
  const Verdict v = classify(rho, req.policy, req.tolerance, workers);

  json j;
  j["request"] = request_to_json(req);
  j["n_spins"] = rho.n_spins();
  j["verdict"] = std::string(verdict_name(v.kind));
  j["exit_code"] = exit_code_for(v.kind);
  j["mean_spins"] = json::array();
  for (std::size_t s = 1; s <= rho.n_spins(); ++s) {
    const auto m = mean_spin(rho, s);
    j["mean_spins"].push_back({round15(m.vector[0]), round15(m.vector[1]), round15(m.vector[2])});
  }
  j["stage_minima"] = {{"part_i", round15(v.best_full.extremum.min_value)},
                       {"part_ii", v.best_reduced ? json(round15(v.best_reduced->extremum.min_value))
                                                  : json(nullptr)}};
  if (req.outputs.witnesses) {
    j["witness"] = v.witness ? witness_to_json(*v.witness) : json(nullptr);
    j["best_full"] = witness_to_json(v.best_full);
    if (v.negativity_witness) j["negativity_witness"] = marginal_to_json(*v.negativity_witness);
    if (!v.marginals.empty()) {
      j["marginals"] = json::array();
      for (const auto& m : v.marginals) j["marginals"].push_back(marginal_to_json(m));
    }
  }
  if (req.outputs.ppt && rho.n_spins() >= 2) {
    j["ppt"] = json::array();
    for (const auto& r : ppt_all(rho, req.tolerance)) j["ppt"].push_back(ppt_to_json(r));
  }
  if (req.outputs.tables) {
    const auto frames = req.frames ? *req.frames : candidate_frames(rho, req.policy).front();
    j["tables"] = json::array({table_to_json(full_jqp_table(rho, frames))});
    if (v.witness && !(v.witness->subset == full_subset(rho.n_spins()))) {
      j["tables"].push_back(table_to_json(jqp_table(rho, v.witness->frames, v.witness->subset)));
    }
  }
  if (req.outputs.matrix) j["density_matrix"] = matrix_to_json(rho.matrix());
  return {std::move(j), exit_code_for(v.kind)};
}

/// Table for the request's frames (default: first candidate) and subset
/// (default: all three axes on every spin).
inline JqpTable requested_table(const AnalysisRequest& req) {
  const DensityMatrix rho = build_state(req.state);
  check_request_shape(req, rho.n_spins());
  const auto frames = req.frames ? *req.frames : candidate_frames(rho, req.policy).front();
  const auto subset = req.subset ? *req.subset : full_subset(rho.n_spins());
  return jqp_table(rho, frames, subset);
}

inline json threshold_to_json(const ThresholdResult& r) {
  return {{"parameter", r.parameter},
          {"target", std::string(target_name(r.target))},
          {"critical_value", round15(r.critical_value)},
          {"bracket", {round15(r.lo), round15(r.hi)}}};
}

inline json catalog_to_json() {
  json out = json::array();
  for (const auto& f : family_catalog()) {
    json params = json::array();
    for (auto p : f.params) params.push_back(std::string(p));
    out.push_back({{"family", std::string(f.name)},
                   {"params", params},
                   {"constraints", std::string(f.constraints)},
                   {"description", std::string(f.description)}});
  }
  return out;
}

}  // namespace jqp::io
