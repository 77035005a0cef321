#pragma once
// Run configuration: flat `key = value` text in [problem], [solver], [ev],
// [output] and [converge] sections. `#` and `;` start comments.

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hermitefc/errors.hpp"
#include "hermitefc/problems.hpp"

namespace hermitefc {

struct ConvergeOptions {
  std::vector<int> m{1, 2, 3};
  std::vector<int> nx;
  /// "exact" uses the problem's analytic solution, "self" a fine run.
  std::string reference = "exact";
  int reference_m = 5;
  int reference_nx = 0;
  std::string variable = "rho";
  /// "linf" or "l1".
  std::string norm = "l1";
  /// Evaluation points per cell; above 1 the error is also measured between nodes.
  int samples_per_cell = 1;

  bool operator==(const ConvergeOptions&) const = default;
};

struct RunConfig {
  std::string problem;
  std::map<std::string, std::string> overrides;
  std::string output_dir = ".";
  std::vector<double> snapshot_times;
  int snapshot_count = 0;
  bool dump_nu = true;
  bool dump_coefficients = false;
  std::uint64_t seed = 0;
  ConvergeOptions converge;
};

namespace detail {

inline const std::vector<std::string>& solver_keys() {
  static const std::vector<std::string> k = {"m", "cfl", "max_steps", "viscous_dt_guard"};
  return k;
}
inline const std::vector<std::string>& ev_keys() {
  static const std::vector<std::string> k = {"alpha_ev", "alpha_max", "beta", "use_delta_u"};
  return k;
}
inline bool contains(const std::vector<std::string>& v, const std::string& k) {
  return std::find(v.begin(), v.end(), k) != v.end();
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (double d : parse_list(key, v)) {
    if (d != std::floor(d) || std::abs(d) > 2e9) throw ConfigError("key '" + key + "': not an integer list");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

inline std::string fmt_int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

}  // namespace detail

/// The problem spec a configuration describes.
inline ProblemSpec resolve(const RunConfig& c) {
  if (c.problem.empty()) throw ConfigError("key 'problem': missing problem name");
  return make_problem(c.problem, c.overrides);
}

inline void validate(const RunConfig& c) {
  const auto spec = resolve(c);
  for (double t : c.snapshot_times)
    if (!(t >= 0.0)) throw ConfigError("key 'snapshot_times': times must be nonnegative");
  if (c.snapshot_count < 0) throw ConfigError("key 'snapshot_count': must be nonnegative");
  const auto& cv = c.converge;
  for (int m : cv.m)
    if (m < 1 || m > kMaxOrder) throw ConfigError("key 'converge.m': orders must be in 1..5");
  for (int n : cv.nx)
    if (n < 3) throw ConfigError("key 'converge.nx': levels need at least 3 cells");
  if (cv.reference != "exact" && cv.reference != "self")
    throw ConfigError("key 'reference': expected exact or self");
  if (cv.reference == "self" && (cv.reference_m < 1 || cv.reference_m > kMaxOrder))
    throw ConfigError("key 'reference_m': must be in 1..5");
  if (cv.reference == "self" && cv.reference_nx < 3) throw ConfigError("key 'reference_nx': must be at least 3");
  if (cv.norm != "l1" && cv.norm != "linf") throw ConfigError("key 'norm': expected l1 or linf");
  if (cv.samples_per_cell < 1) throw ConfigError("key 'samples_per_cell': must be at least 1");
  (void)spec;
}

/// Parses configuration text; errors carry the offending line number.
inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  RunConfig c;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  ProblemSpec scratch;
  while (std::getline(in, raw)) {
    ++line;
    auto cut = raw.find_first_of("#;");
    std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (section != "problem" && section != "solver" && section != "ev" && section != "output" &&
          section != "converge")
        throw ConfigError("unknown section '" + section + "'", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = unquote(trim(s.substr(eq + 1)));
    if (key.empty()) throw ConfigError("empty key", line);
    if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line);
    try {
      if (section == "problem") {
        if (key == "problem") {
          c.problem = value;
        } else if (key == "name" || contains(solver_keys(), key) || contains(ev_keys(), key) ||
                   !set_field(scratch, key, value)) {
          throw ConfigError("unknown key '" + key + "' in [problem]");
        } else {
          c.overrides[key] = value;
        }
      } else if (section == "solver" || section == "ev") {
        if (section == "solver" && key == "seed") {
          const double d = parse_double(key, value);
          if (d < 0 || d != std::floor(d)) throw ConfigError("key 'seed': expected a nonnegative integer");
          c.seed = static_cast<std::uint64_t>(d);
        } else if (!contains(section == "solver" ? solver_keys() : ev_keys(), key)) {
          throw ConfigError("unknown key '" + key + "' in [" + section + "]");
        } else {
          set_field(scratch, key, value);
          c.overrides[key] = value;
        }
      } else if (section == "output") {
        if (key == "dir") c.output_dir = value;
        else if (key == "snapshot_times") c.snapshot_times = parse_list(key, value);
        else if (key == "snapshot_count") c.snapshot_count = parse_int(key, value);
        else if (key == "dump_nu") c.dump_nu = parse_bool(key, value);
        else if (key == "dump_coefficients") c.dump_coefficients = parse_bool(key, value);
        else throw ConfigError("unknown key '" + key + "' in [output]");
      } else {
        auto& cv = c.converge;
        if (key == "m") cv.m = parse_int_list(key, value);
        else if (key == "nx") cv.nx = parse_int_list(key, value);
        else if (key == "reference") cv.reference = value;
        else if (key == "reference_m") cv.reference_m = parse_int(key, value);
        else if (key == "reference_nx") cv.reference_nx = parse_int(key, value);
        else if (key == "variable") cv.variable = value;
        else if (key == "norm") cv.norm = value;
        else if (key == "samples_per_cell") cv.samples_per_cell = parse_int(key, value);
        else throw ConfigError("unknown key '" + key + "' in [converge]");
      }
    } catch (const ConfigError& e) {
      if (e.line() > 0) throw;
      throw ConfigError(e.what(), line);
    }
  }
  validate(c);
  return c;
}

/// Fully resolved configuration text: every problem field is written out.
inline std::string serialize(const RunConfig& c) {
  using namespace detail;
  const auto spec = resolve(c);
  std::ostringstream os;
  std::ostringstream solver, ev;
  os << "[problem]\nproblem = " << c.problem << "\n";
  for (const auto& [k, v] : problem_fields(spec)) {
    if (k == "name") continue;
    if (contains(solver_keys(), k)) solver << k << " = " << v << "\n";
    else if (contains(ev_keys(), k)) ev << k << " = " << v << "\n";
    else os << k << " = " << v << "\n";
  }
  os << "\n[solver]\n" << solver.str() << "seed = " << c.seed << "\n";
  os << "\n[ev]\n" << ev.str();
  os << "\n[output]\ndir = " << c.output_dir << "\n";
  if (!c.snapshot_times.empty()) os << "snapshot_times = " << fmt_list(c.snapshot_times) << "\n";
  os << "snapshot_count = " << c.snapshot_count << "\n";
  os << "dump_nu = " << (c.dump_nu ? "true" : "false") << "\n";
  os << "dump_coefficients = " << (c.dump_coefficients ? "true" : "false") << "\n";
  const auto& cv = c.converge;
  os << "\n[converge]\nm = " << fmt_int_list(cv.m) << "\n";
  if (!cv.nx.empty()) os << "nx = " << fmt_int_list(cv.nx) << "\n";
  os << "reference = " << cv.reference << "\nreference_m = " << cv.reference_m
     << "\nreference_nx = " << cv.reference_nx << "\nvariable = " << cv.variable << "\nnorm = " << cv.norm
     << "\nsamples_per_cell = " << cv.samples_per_cell << "\n";
  return os.str();
}

/// Equality of the resolved problems and all run options.
inline bool equivalent(const RunConfig& a, const RunConfig& b) {
  return a.problem == b.problem && problem_fields(resolve(a)) == problem_fields(resolve(b)) &&
         a.output_dir == b.output_dir && a.snapshot_times == b.snapshot_times &&
         a.snapshot_count == b.snapshot_count && a.dump_nu == b.dump_nu &&
         a.dump_coefficients == b.dump_coefficients && a.seed == b.seed && a.converge == b.converge;
}

}  // namespace hermitefc
