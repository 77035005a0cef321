// hermitefc: command line front end.
//
//   hermitefc run <config>         advance a problem, write snapshots + manifest
//   hermitefc converge <config>    grid-ladder error table
//   hermitefc riemann --left r,u,p --right r,u,p [--gamma g] [--time t]
//   hermitefc list-problems
//
// Exit status: 0 ok, 2 configuration error, 3 solver abort.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hermitefc/config.hpp"
#include "hermitefc/diag.hpp"
#include "hermitefc/parallel.hpp"
#include "hermitefc/problems.hpp"
#include "hermitefc/run.hpp"

namespace fs = std::filesystem;
using namespace hermitefc;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;

RunConfig load_config(const std::string& path, const std::string& problem) {
  if (!problem.empty()) {
    RunConfig c;
    c.problem = problem;
    validate(c);
    return c;
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

json manifest(const RunConfig& cfg, const ProblemSpec& spec, const RunOutput& out,
              const std::vector<std::string>& files) {
  json j;
  json params;
  for (const auto& [k, v] : problem_fields(spec)) params[k] = v;
  j["parameters"] = params;
  j["config"] = serialize(cfg);
  j["status"] = out.status == RunStatus::ok ? "ok" : "aborted";
  if (out.status != RunStatus::ok) {
    j["error"] = out.error;
    j["error_step"] = out.error_step;
  }
  const auto& r = out.record;
  j["dt"] = r.dt;
  j["steps"] = r.steps;
  j["time"] = r.time;
  j["max_nu"] = r.max_nu;
  j["viscous_dt_warning"] = r.viscous_dt_warning;
  j["warnings"] = r.warnings;
  j["initial_mass"] = r.initial_mass;
  j["final_mass"] = r.final_mass;
  j["sponge_mass"] = r.sponge_mass;
  j["threads"] = thread_count();
  j["wall_seconds"] = out.wall_seconds;
  json series = json::array();
  for (const auto& c : out.conservation) series.push_back({{"time", c.time}, {"moments", c.moments}});
  j["conservation"] = series;
  j["snapshots"] = files;
  return j;
}

int cmd_run(const std::string& path, const std::string& problem) {
  const RunConfig cfg = load_config(path, problem);
  const ProblemSpec spec = resolve(cfg);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  std::vector<std::string> files;
  RunOptions opt;
  opt.snapshot_times = snapshot_schedule(cfg, spec);
  opt.coefficients = cfg.dump_coefficients;
  opt.on_snapshot = [&](const Snapshot& s, const std::string& coef) {
    const std::string name = snapshot_file_name(spec.name, s.time);
    std::ofstream f(dir / name);
    write_snapshot_csv(f, s, cfg.dump_nu);
    files.push_back(name);
    if (!coef.empty()) {
      const std::string cname = name.substr(0, name.size() - 4) + "_coefficients.csv";
      write_text(dir / cname, coef);
      files.push_back(cname);
    }
  };
  const RunOutput out = run_problem(spec, opt);
  write_text(dir / (spec.name + "_manifest.json"), manifest(cfg, spec, out, files).dump(2) + "\n");
  std::printf("%s: %ld steps, dt %.6g, t %.6g, max nu %.3g, %.2f s\n", spec.name.c_str(), out.record.steps,
              out.record.dt, out.record.time, out.record.max_nu, out.wall_seconds);
  for (const auto& w : out.record.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (out.status != RunStatus::ok) {
    std::ostringstream diag;
    diag << "problem: " << spec.name << "\nstep: " << out.error_step << "\nerror: " << out.error << "\n";
    write_text(dir / (spec.name + "_abort.txt"), diag.str());
    std::fprintf(stderr, "solver abort: %s\n", out.error.c_str());
    return kExitAbort;
  }
  return 0;
}

int cmd_converge(const std::string& path) {
  const RunConfig cfg = parse_config([&] {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }());
  const ProblemSpec spec = resolve(cfg);
  const auto res = converge(spec, cfg.converge);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  std::ostringstream csv, txt;
  write_table_csv(csv, res.table);
  write_table_text(txt, res.table);
  write_text(dir / (spec.name + "_converge.csv"), csv.str());
  write_text(dir / (spec.name + "_converge.txt"), txt.str());
  std::cout << txt.str();
  for (const auto& lv : res.levels)
    if (lv.status != RunStatus::ok) {
      std::fprintf(stderr, "solver abort (m=%d, nx=%d): %s\n", lv.m, lv.nx, lv.message.c_str());
      return kExitAbort;
    }
  return 0;
}

std::array<double, 3> parse_triplet(const std::string& what, const std::string& s) {
  const auto v = detail::parse_list(what, s);
  if (v.size() != 3) throw ConfigError(what + ": expected rho,u,p");
  return {v[0], v[1], v[2]};
}

int cmd_riemann(const std::string& left, const std::string& right, double gamma, double t, double xl, double xr,
                double x0, int points) {
  const auto l = parse_triplet("--left", left);
  const auto r = parse_triplet("--right", right);
  if (!(gamma > 1.0)) throw ConfigError("--gamma must exceed 1");
  if (!(t > 0.0)) throw ConfigError("--time must be positive");
  if (points < 2 || !(xr > xl)) throw ConfigError("--points must be at least 2 and xr > xl");
  const auto L = make_primitive(l[0], l[1], 0.0, l[2], gamma);
  const auto R = make_primitive(r[0], r[1], 0.0, r[2], gamma);
  const auto sol = solve_riemann(L, R, gamma);
  std::printf("# p* = %.17g  u* = %.17g  rho*L = %.17g  rho*R = %.17g\n", sol.p_star, sol.u_star,
              sol.rho_star_left, sol.rho_star_right);
  std::printf("x,rho,u,p\n");
  for (int i = 0; i < points; ++i) {
    const double x = xl + (xr - xl) * i / (points - 1);
    const auto w = sol.sample((x - x0) / t);
    std::printf("%.17g,%.17g,%.17g,%.17g\n", x, w.rho, w.u, w.p);
  }
  return 0;
}

int cmd_list() {
  for (const auto& name : problem_names()) {
    const auto s = make_problem(name);
    if (s.dims() == 2)
      std::printf("%-18s %-10s %4dx%-4d m=%d t=%g\n", name.c_str(), to_string(s.model.kind).c_str(), s.nx, s.ny,
                  s.m, s.t_final);
    else
      std::printf("%-18s %-10s %9d m=%d t=%g\n", name.c_str(), to_string(s.model.kind).c_str(), s.nx, s.m,
                  s.t_final);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flux-conservative Hermite solver with entropy viscosity"};
  app.require_subcommand(1);

  std::string run_path, run_problem_name;
  auto* run = app.add_subcommand("run", "Advance a problem and write snapshots");
  auto* run_cfg = run->add_option("config", run_path, "Configuration file");
  run->add_option("--problem", run_problem_name, "Run a named problem with its defaults")->excludes(run_cfg);

  std::string conv_path;
  auto* conv = app.add_subcommand("converge", "Grid refinement study");
  conv->add_option("config", conv_path, "Configuration file")->required();

  std::string left, right;
  double gamma = 1.4, time = 1.0, xl = -0.5, xr = 0.5, x0 = 0.0;
  int points = 101;
  auto* rie = app.add_subcommand("riemann", "Sample the exact Riemann solution");
  rie->add_option("--left", left, "Left state rho,u,p")->required();
  rie->add_option("--right", right, "Right state rho,u,p")->required();
  rie->add_option("--gamma", gamma, "Ratio of specific heats");
  rie->add_option("--time", time, "Sampling time");
  rie->add_option("--xl", xl, "Left end of the sampled interval");
  rie->add_option("--xr", xr, "Right end of the sampled interval");
  rie->add_option("--x0", x0, "Initial discontinuity position");
  rie->add_option("--points", points, "Number of samples");

  auto* list = app.add_subcommand("list-problems", "Print the built-in problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      if (run_path.empty() && run_problem_name.empty()) throw ConfigError("run: give a config file or --problem");
      return cmd_run(run_path, run_problem_name);
    }
    if (conv->parsed()) return cmd_converge(conv_path);
    if (rie->parsed()) return cmd_riemann(left, right, gamma, time, xl, xr, x0, points);
    if (list->parsed()) return cmd_list();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const VacuumError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const SolverAbort& e) {
    std::fprintf(stderr, "solver abort: %s\n", e.what());
    return kExitAbort;
  } catch (const PositivityError& e) {
    std::fprintf(stderr, "solver abort: %s\n", e.what());
    return kExitAbort;
  }
  return 0;
}
