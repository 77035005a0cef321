#pragma once
// Runtime dispatch over (m, model), single runs with snapshot output, and
// grid-ladder convergence studies.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "hermitefc/config.hpp"
#include "hermitefc/diag.hpp"
#include "hermitefc/errors.hpp"
#include "hermitefc/problems.hpp"
#include "hermitefc/solver.hpp"

namespace hermitefc {

namespace detail {

template <int M, class Fn>
decltype(auto) dispatch_model(const ProblemSpec& s, Fn&& fn) {
  constexpr int N = 2 * M + 2;
  switch (s.model.kind) {
    case ModelKind::burgers1d: return fn(std::type_identity<Solver<M, Field1D<N, 1>>>{});
    case ModelKind::euler1d: return fn(std::type_identity<Solver<M, Field1D<N, 3>>>{});
    case ModelKind::euler2d: break;
  }
  return fn(std::type_identity<Solver<M, Field2D<N, 4>>>{});
}

}  // namespace detail

/// Calls fn(std::type_identity<Solver<m, Field>>{}) for the spec's order and model.
template <class Fn>
decltype(auto) dispatch(const ProblemSpec& s, Fn&& fn) {
  switch (s.m) {
    case 1: return detail::dispatch_model<1>(s, fn);
    case 2: return detail::dispatch_model<2>(s, fn);
    case 3: return detail::dispatch_model<3>(s, fn);
    case 4: return detail::dispatch_model<4>(s, fn);
    case 5: break;
    default: throw ConfigError("key 'm': must be in 1..5");
  }
  return detail::dispatch_model<5>(s, fn);
}

/// Moments k = 0..m of every variable at one time.
struct ConservationSample {
  double time = 0.0;
  std::vector<std::vector<double>> moments;
};

struct RunOptions {
  std::vector<double> snapshot_times;
  /// Receives each snapshot and, when coefficients are requested, a CSV of
  /// the node polynomials.
  std::function<void(const Snapshot&, const std::string& coefficients)> on_snapshot;
  bool coefficients = false;
  long max_full_steps = -1;
  int probe_kmax = -1;
};

enum class RunStatus { ok, aborted };

struct RunOutput {
  RunStatus status = RunStatus::ok;
  std::string error;
  long error_step = 0;
  RunRecord record;
  Snapshot final_snapshot;
  std::vector<ConservationSample> conservation;
  double wall_seconds = 0.0;
  /// Pointwise evaluation of a snapshot column from the final 1D polynomials.
  std::function<double(const std::string&, double)> sample;
};

namespace detail {

template <class Field>
std::string coefficient_csv(const Field& f) {
  std::ostringstream os;
  char buf[64];
  constexpr bool two_d = requires { f.grid.hx(); };
  os << (two_d ? "x,y" : "x") << ",var";
  if constexpr (two_d) {
    for (int i = 0; i < Field::ncoef; ++i)
      for (int j = 0; j < Field::ncoef; ++j) os << ",c" << i << "_" << j;
  } else {
    for (int i = 0; i < Field::ncoef; ++i) os << ",c" << i;
  }
  os << "\n";
  for (const auto& node : f.node)
    for (int v = 0; v < Field::nvar; ++v) {
      const auto& p = node[static_cast<std::size_t>(v)];
      if constexpr (two_d) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", p.center[0], p.center[1]);
        os << buf << "," << v;
        for (double c : p.c) {
          std::snprintf(buf, sizeof buf, ",%.17g", c);
          os << buf;
        }
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", p.center);
        os << buf << "," << v;
        for (double c : p.c) {
          std::snprintf(buf, sizeof buf, ",%.17g", c);
          os << buf;
        }
      }
      os << "\n";
    }
  return os.str();
}

template <class Field>
ConservationSample conservation_sample(const Field& f, int m) {
  ConservationSample c;
  c.time = f.time;
  c.moments.assign(static_cast<std::size_t>(Field::nvar), std::vector<double>(static_cast<std::size_t>(m + 1)));
  for (int k = 0; k <= m; ++k) {
    const auto mom = moment_integral(f, k);
    for (int v = 0; v < Field::nvar; ++v)
      c.moments[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)] = mom[static_cast<std::size_t>(v)];
  }
  return c;
}

template <int N, int NV>
std::function<double(const std::string&, double)> field_sampler(const Field1D<N, NV>& f, const FluxModel& model) {
  return [f, model](const std::string& column, double x) {
    std::array<double, NV> q{};
    for (int v = 0; v < NV; ++v) q[static_cast<std::size_t>(v)] = sample(f, v, x);
    if constexpr (NV == 1) {
      if (column == "u") return q[0];
    } else {
      const double u = q[1] / q[0];
      if (column == "rho") return q[0];
      if (column == "rho_u") return q[1];
      if (column == "E") return q[2];
      if (column == "u") return u;
      if (column == "p") return (model.gamma - 1.0) * (q[2] - 0.5 * q[0] * u * u);
    }
    throw ConfigError("unknown column '" + column + "'");
  };
}

}  // namespace detail

/// Runs a problem to its final time. Solver failures are reported in the
/// result rather than thrown; configuration errors propagate.
inline RunOutput run_problem(const ProblemSpec& spec, const RunOptions& opt = {}) {
  return dispatch(spec, [&](auto tag) {
    using S = typename decltype(tag)::type;
    RunOutput out;
    const auto t0 = std::chrono::steady_clock::now();
    S solver(spec);
    if (opt.probe_kmax >= 0) solver.enable_probe(opt.probe_kmax);
    auto cb = [&](const Snapshot& s) {
      out.conservation.push_back(detail::conservation_sample(solver.field(), spec.m));
      if (opt.on_snapshot) opt.on_snapshot(s, opt.coefficients ? detail::coefficient_csv(solver.field()) : "");
    };
    try {
      solver.run(opt.snapshot_times, cb, opt.max_full_steps);
    } catch (const PositivityError& e) {
      out.status = RunStatus::aborted;
      out.error = e.what();
      out.error_step = solver.steps_taken() + 1;
    } catch (const SolverAbort& e) {
      out.status = RunStatus::aborted;
      out.error = e.what();
      out.error_step = e.step();
    }
    out.record = solver.record();
    out.final_snapshot = solver.snapshot();
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if constexpr (!S::two_d) out.sample = detail::field_sampler(solver.field(), spec.model);
    return out;
  });
}

/// `<name>_t<time>.csv` with the time printed by %g.
inline std::string snapshot_file_name(const std::string& name, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "_t%g.csv", t);
  return name + buf;
}

/// Snapshot times of a configuration: explicit times, else `count` evenly
/// spaced times ending at t_final, else t_final alone.
inline std::vector<double> snapshot_schedule(const RunConfig& c, const ProblemSpec& spec) {
  if (!c.snapshot_times.empty()) return c.snapshot_times;
  if (c.snapshot_count > 0) {
    std::vector<double> t;
    for (int k = 1; k <= c.snapshot_count; ++k) t.push_back(spec.t_final * k / c.snapshot_count);
    return t;
  }
  return {spec.t_final};
}

// ---------------------------------------------------------------------------
// Convergence studies

struct ConvergeLevel {
  int m = 0;
  int nx = 0;
  double h = 0.0;
  ErrorNorms error;
  RunStatus status = RunStatus::ok;
  std::string message;
};

struct ConvergeResult {
  ConvergenceTable table;
  std::vector<ConvergeLevel> levels;
};

/// Runs the grid ladder of `opt` for each order and measures the chosen
/// norm of one column against the exact solution or a fine self-reference.
inline ConvergeResult converge(const ProblemSpec& base, const ConvergeOptions& opt) {
  if (opt.nx.empty()) throw ConfigError("key 'nx': the convergence ladder is empty");
  if (base.dims() != 1) throw ConfigError("convergence studies are available for 1D problems");
  auto level_spec = [&](int m, int nx) {
    ProblemSpec s = base;
    s.m = m;
    s.nx = nx;
    validate(s);
    return s;
  };
  std::optional<RunOutput> ref;
  if (opt.reference == "self") {
    const auto rs = level_spec(opt.reference_m, opt.reference_nx);
    auto r = run_problem(rs);
    if (r.status != RunStatus::ok) throw SolverAbort("reference run failed: " + r.error, r.error_step);
    ref = std::move(r);
  } else {
    if (!exact_value(base, opt.variable, base.xl, base.t_final))
      throw ConfigError("problem '" + base.name + "' has no exact solution for '" + opt.variable + "'");
  }
  ConvergeResult res;
  res.table.h_label = "h";
  res.table.error_label = opt.norm == "linf" ? "linf-err" : "L1-err";
  for (int nx : opt.nx) res.table.h.push_back((base.xr - base.xl) / nx);
  for (int m : opt.m) {
    ConvergenceRow row;
    row.label = "m=" + std::to_string(m);
    for (int nx : opt.nx) {
      const auto s = level_spec(m, nx);
      const auto out = run_problem(s);
      ConvergeLevel lv;
      lv.m = m;
      lv.nx = nx;
      lv.h = s.hx();
      lv.status = out.status;
      lv.message = out.error;
      if (out.status == RunStatus::ok) {
        const auto& snap = out.final_snapshot;
        const int q = opt.samples_per_cell;
        std::vector<double> xs, col;
        for (std::size_t k = 0; k < snap.x.size(); ++k)
          for (int i = 0; i < q; ++i) {
            const double x = snap.x[k] + s.hx() * i / q;
            if (i > 0 && x > s.xr) break;
            xs.push_back(x);
            col.push_back(i == 0 ? snap.column(opt.variable)[k] : out.sample(opt.variable, x));
          }
        std::vector<double> refv(col.size());
        for (std::size_t k = 0; k < col.size(); ++k) {
          if (ref) {
            refv[k] = ref->sample(opt.variable, xs[k]);
          } else {
            refv[k] = *exact_value(s, opt.variable, xs[k], snap.time);
          }
        }
        lv.error = error_norms(col, refv, s.hx() / q);
      } else {
        lv.error = {std::nan(""), std::nan("")};
      }
      row.errors.push_back(opt.norm == "linf" ? lv.error.linf : lv.error.l1);
      res.levels.push_back(lv);
    }
    res.table.rows.push_back(row);
  }
  return res;
}

}  // namespace hermitefc
