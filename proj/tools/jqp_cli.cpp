// jqp: joint quasiprobability analysis of spin-1/2 states.
//
//   jqp analyze --state '{"family":"werner","params":{"x":0.45}}'
//   jqp table   --state req.json --format csv
//   jqp scan    --state '{"family":"gisin","params":{"alpha":0.6}}' --param x --range 0,1 --target ppt
//   jqp states
//
// analyze exits 0 (ClassicalSeparable), 1 (Classical) or 2 (NotIdentified).
// Errors: 64 malformed input, 65 invalid state, 66 no sign change, 70 other.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jqp/classify.hpp"
#include "jqp/io.hpp"
#include "jqp/states.hpp"

namespace {

using jqp::io::json;
using jqp::io::MalformedInput;

constexpr int kExitMalformed = 64;
constexpr int kExitInvalidState = 65;
constexpr int kExitNoSignChange = 66;
constexpr int kExitOther = 70;

struct CommonFlags {
  std::string state;
  std::string policy;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
  std::string format = "json";
};

json load_document(const std::string& arg) {
  std::string text = arg;
  if (arg.empty()) throw MalformedInput("--state is required");
  if (arg.front() != '{') {
    std::ifstream in(arg);
    if (!in) throw MalformedInput("cannot read state file '" + arg + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedInput(std::string("invalid JSON: ") + e.what());
  }
}

jqp::io::AnalysisRequest load_request(const CommonFlags& flags) {
  auto req = jqp::io::parse_request(load_document(flags.state));
  if (flags.seed) req.policy.seed = *flags.seed;
  if (!flags.policy.empty()) {
    try {
      req.policy = jqp::FramePolicy::parse(flags.policy, req.policy.seed);
    } catch (const jqp::DomainError& e) {
      throw MalformedInput(e.what());
    }
  }
  if (flags.tol) {
    if (!(*flags.tol >= 0.0)) throw MalformedInput("--tol must be non-negative");
    req.tolerance = *flags.tol;
  }
  return req;
}

void emit(const CommonFlags& flags, const std::string& text) {
  if (flags.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(flags.out);
  if (!out) throw jqp::Error("cannot write '" + flags.out + "'");
  out << text;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_state = true) {
  auto* opt = cmd->add_option("--state", flags.state, "State or request: JSON file path or inline JSON");
  if (needs_state) opt->required();
  cmd->add_option("--policy", flags.policy, "canonical | grid:K | random:M");
  cmd->add_option("--tol", flags.tol, "Non-negativity tolerance (default 1e-10 or $JQP_DEFAULT_TOL)");
  cmd->add_option("--seed", flags.seed, "Seed for random frame sampling (default 0)");
  cmd->add_option("--workers", flags.workers, "Parallel table workers")->check(CLI::PositiveNumber);
  cmd->add_option("--out", flags.out, "Write output to this path instead of stdout");
  cmd->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

jqp::DirectionSubset parse_subset_flag(const std::string& text) {
  jqp::DirectionSubset s;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      s.push_back(jqp::AxisSet::parse(item));
    } catch (const jqp::DomainError& e) {
      throw MalformedInput(e.what());
    }
  }
  return s;
}

int run_analyze(const CommonFlags& flags) {
  const auto req = load_request(flags);
  const auto report = jqp::io::analyze(req, flags.workers);
  if (flags.format == "csv") {
    const auto& d = report.document;
    std::ostringstream os;
    os << "verdict,part_i_min,part_ii_min,ppt_min\n" << d["verdict"].get<std::string>() << ',';
    os << jqp::io::format_number(d["stage_minima"]["part_i"].get<double>()) << ',';
    if (!d["stage_minima"]["part_ii"].is_null())
      os << jqp::io::format_number(d["stage_minima"]["part_ii"].get<double>());
    os << ',';
    if (d.contains("ppt")) {
      double worst = INFINITY;
      for (const auto& r : d["ppt"]) worst = std::min(worst, r["min_eigenvalue"].get<double>());
      os << jqp::io::format_number(worst);
    }
    os << '\n';
    emit(flags, os.str());
  } else {
    emit(flags, report.document.dump(2) + "\n");
  }
  return report.exit_code;
}

int run_table(const CommonFlags& flags, const std::string& subset_flag) {
  auto req = load_request(flags);
  if (!subset_flag.empty()) req.subset = parse_subset_flag(subset_flag);
  const auto table = jqp::io::requested_table(req);
  if (flags.format == "csv") {
    emit(flags, jqp::io::table_to_csv(table));
  } else {
    emit(flags, jqp::io::table_to_json(table).dump(2) + "\n");
  }
  return 0;
}

struct ScanFlags {
  std::string param;
  std::vector<double> range;
  std::string target = "part_i";
  std::string subset;
  double tol = 1e-9;
  std::size_t sweep = 0;
  std::string sweep_out;
};

int run_scan(const CommonFlags& flags, const ScanFlags& scan) {
  const auto req = load_request(flags);
  if (scan.range.size() != 2 || !(scan.range[0] < scan.range[1])) {
    throw MalformedInput("--range takes lo,hi with lo < hi");
  }
  jqp::ScanOptions opts;
  opts.policy = req.policy;
  opts.tol = scan.tol;
  if (!scan.subset.empty()) opts.subset = parse_subset_flag(scan.subset);
  jqp::ScanTarget target{};
  try {
    target = jqp::parse_target(scan.target);
  } catch (const jqp::DomainError& e) {
    throw MalformedInput(e.what());
  }

  if (scan.sweep > 0) {
    std::ostringstream os;
    os << scan.param << ",part_i_min,part_ii_min,ppt_min\n";
    const double lo = scan.range[0];
    const double hi = scan.range[1];
    for (std::size_t k = 0; k <= scan.sweep; ++k) {
      const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(scan.sweep);
      const auto rho = jqp::build_state(req.state.with(scan.param, t));
      os << jqp::io::format_number(t) << ','
         << jqp::io::format_number(jqp::monitored_value(rho, jqp::ScanTarget::part_i, opts)) << ','
         << jqp::io::format_number(jqp::monitored_value(rho, jqp::ScanTarget::part_ii, opts)) << ','
         << jqp::io::format_number(jqp::monitored_value(rho, jqp::ScanTarget::ppt, opts)) << '\n';
    }
    if (scan.sweep_out.empty()) {
      std::cerr << os.str();
    } else {
      std::ofstream out(scan.sweep_out);
      if (!out) throw jqp::Error("cannot write '" + scan.sweep_out + "'");
      out << os.str();
    }
  }

  const auto result =
      jqp::threshold_scan(req.state, scan.param, scan.range[0], scan.range[1], target, opts);
  if (flags.format == "csv") {
    emit(flags, "parameter,target,critical_value,lo,hi\n" + result.parameter + "," +
                    std::string(jqp::target_name(result.target)) + "," +
                    jqp::io::format_number(result.critical_value) + "," +
                    jqp::io::format_number(result.lo) + "," + jqp::io::format_number(result.hi) + "\n");
  } else {
    emit(flags, jqp::io::threshold_to_json(result).dump(2) + "\n");
  }
  return 0;
}

int run_states(const CommonFlags& flags) {
  if (flags.format == "json") {
    emit(flags, jqp::io::catalog_to_json().dump(2) + "\n");
    return 0;
  }
  std::ostringstream os;
  os << "family,params,constraints,description\n";
  for (const auto& f : jqp::family_catalog()) {
    os << f.name << ',';
    for (std::size_t i = 0; i < f.params.size(); ++i) os << (i ? " " : "") << f.params[i];
    os << ",\"" << f.constraints << "\",\"" << f.description << "\"\n";
  }
  emit(flags, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint quasiprobability classicality analysis for spin-1/2 systems"};
  app.require_subcommand(1);

  CommonFlags analyze_flags, table_flags, scan_flags, states_flags;
  std::string table_subset;
  ScanFlags scan;

  auto* analyze = app.add_subcommand("analyze", "Classify a state and run partial-transpose checks");
  add_common(analyze, analyze_flags);

  auto* table = app.add_subcommand("table", "Dump a quasiprobability table");
  add_common(table, table_flags);
  table->add_option("--subset", table_subset, "Axes per spin, e.g. abc,abc or bc,ac");

  auto* scan_cmd = app.add_subcommand("scan", "Bisect a family parameter for a threshold");
  add_common(scan_cmd, scan_flags);
  scan_cmd->add_option("--param", scan.param, "Parameter to vary")->required();
  scan_cmd->add_option("--range", scan.range, "lo,hi")->delimiter(',')->required();
  scan_cmd->add_option("--target", scan.target, "part_i | part_ii | ppt");
  scan_cmd->add_option("--subset", scan.subset, "Restrict part_ii to one axis choice, e.g. bc,bc");
  scan_cmd->add_option("--bisect-tol", scan.tol, "Bracket width (default 1e-9)");
  scan_cmd->add_option("--sweep", scan.sweep, "Also sample N+1 evenly spaced points");
  scan_cmd->add_option("--sweep-out", scan.sweep_out, "CSV path for the sweep (default stderr)");

  auto* states = app.add_subcommand("states", "List the built-in state families");
  add_common(states, states_flags, false);
  states_flags.format = "csv";

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitMalformed;
  }

  try {
    if (*analyze) return run_analyze(analyze_flags);
    if (*table) return run_table(table_flags, table_subset);
    if (*scan_cmd) return run_scan(scan_flags, scan);
    if (*states) return run_states(states_flags);
  } catch (const MalformedInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const jqp::InvalidStateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidState;
  } catch (const jqp::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidState;
  } catch (const jqp::BracketError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoSignChange;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
