#pragma once
// Moments, error norms, convergence rates, interface flux jumps and the
// table/snapshot writers used by the command line tool.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hermitefc/errors.hpp"
#include "hermitefc/field.hpp"
#include "hermitefc/solver.hpp"

namespace hermitefc {

// ---------------------------------------------------------------------------
// Moments

/// Integral over the domain of the k-th derivative (along `axis` in 2D) of
/// each conserved variable. Cells of a fixed grid are clipped to the domain.
template <int N, int NV>
std::array<double, NV> moment_integral(const Field1D<N, NV>& f, int k) {
  if (k < 0 || k >= N) throw ContractError("moment_integral: k must lie in 0..2m+1");
  std::array<double, NV> out{};
  for (const auto& node : f.node)
    for (int v = 0; v < NV; ++v) {
      auto p = node[static_cast<std::size_t>(v)];
      if (f.grid.periodic) {
        out[static_cast<std::size_t>(v)] += cell_moment(p, k);
        continue;
      }
      for (int d = 0; d < k; ++d) p = derivative_padded(p);
      out[static_cast<std::size_t>(v)] +=
          integrate_range(p, std::max(f.grid.xL, p.center - p.scale), std::min(f.grid.xR, p.center + p.scale));
    }
  return out;
}

template <int N, int NV>
std::array<double, NV> moment_integral(const Field2D<N, NV>& f, int k, int axis = 0) {
  if (k < 0 || k >= N) throw ContractError("moment_integral: k must lie in 0..2m+1");
  if (axis != 0 && axis != 1) throw ContractError("moment_integral: axis must be 0 or 1");
  const auto& g = f.grid;
  std::array<double, NV> out{};
  for (const auto& node : f.node)
    for (int v = 0; v < NV; ++v) {
      auto p = node[static_cast<std::size_t>(v)];
      if (g.periodic()) {
        out[static_cast<std::size_t>(v)] += cell_moment(p, k, axis);
        continue;
      }
      for (int d = 0; d < k; ++d) p = axis == 0 ? dx_padded(p) : dy_padded(p);
      out[static_cast<std::size_t>(v)] += integrate_range(
          p, std::max(g.gx.xL, p.center[0] - p.scale[0]), std::min(g.gx.xR, p.center[0] + p.scale[0]),
          std::max(g.gy.xL, p.center[1] - p.scale[1]), std::min(g.gy.xR, p.center[1] + p.scale[1]));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Error norms and rates

struct ErrorNorms {
  double l1 = 0.0;
  double linf = 0.0;
};

/// Node-pointwise norms: L1 = measure * sum |diff|, Linf = max |diff|.
inline ErrorNorms error_norms(std::span<const double> numeric, std::span<const double> reference,
                              double cell_measure) {
  if (numeric.size() != reference.size()) throw ContractError("error_norms: size mismatch");
  ErrorNorms e;
  for (std::size_t k = 0; k < numeric.size(); ++k) {
    const double d = std::abs(numeric[k] - reference[k]);
    e.l1 += d;
    e.linf = std::max(e.linf, d);
  }
  e.l1 *= cell_measure;
  return e;
}

/// Norms of one snapshot column against a pointwise reference sampler.
inline ErrorNorms error_norms(const Snapshot& s, const std::string& column,
                              const std::function<double(double, double)>& reference, double cell_measure) {
  const auto& col = s.column(column);
  std::vector<double> ref(col.size());
  for (std::size_t k = 0; k < col.size(); ++k) ref[k] = reference(s.x[k], s.y[k]);
  return error_norms(col, ref, cell_measure);
}

/// Observed orders between consecutive (h, err) pairs; entry 0 has no rate.
/// A zero error leaves the affected rates undefined.
inline std::vector<std::optional<double>> convergence_rates(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) throw ContractError("convergence_rates: need at least two levels");
  std::vector<std::optional<double>> rates(pairs.size());
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    const auto [h0, e0] = pairs[i - 1];
    const auto [h1, e1] = pairs[i];
    if (!(h1 < h0) || !(h1 > 0.0)) throw ContractError("convergence_rates: h must decrease");
    if (e0 > 0.0 && e1 > 0.0) rates[i] = std::log(e0 / e1) / std::log(h0 / h1);
  }
  return rates;
}

/// Value of a 1D field variable at x, from the node polynomial whose cell holds x.
template <int N, int NV>
double sample(const Field1D<N, NV>& f, int var, double x) {
  const auto& g = f.grid;
  const double off = g.parity == Parity::primal ? 0.0 : 0.5;
  int j = static_cast<int>(std::lround((x - g.xL) / g.h() - off));
  if (g.periodic)
    j = ((j % g.nodes()) + g.nodes()) % g.nodes();
  else
    j = std::clamp(j, 0, g.nodes() - 1);
  const auto& p = f.node[static_cast<std::size_t>(j)][static_cast<std::size_t>(var)];
  double xi = x - p.center;
  if (g.periodic) xi -= (g.xR - g.xL) * std::round(xi / (g.xR - g.xL));
  return eval_scaled(p, xi / p.scale);
}

// ---------------------------------------------------------------------------
// Interface flux jumps

/// Largest mismatch of value and first `orders` derivatives between the
/// right end of each cell and the left end of its successor, in the scaled
/// units s^k/k! of the shared cell size. Cells are given in grid order.
template <int N>
double interface_jump(std::span<const TaylorPoly<N>> cells, int orders, bool periodic) {
  if (orders < 0 || orders >= N) throw ContractError("interface_jump: orders out of range");
  double worst = 0.0;
  const std::size_t n = cells.size();
  const std::size_t pairs = periodic ? n : (n == 0 ? 0 : n - 1);
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto& a = cells[i];
    const auto& b = cells[(i + 1) % n];
    // Derivatives in xi at xi = +1 (a) and xi = -1 (b), divided by k!.
    for (int k = 0; k <= orders; ++k) {
      double da = 0.0, db = 0.0;
      for (int j = N - 1; j >= k; --j) {
        double binom = 1.0;
        for (int t = 1; t <= k; ++t) binom = binom * (j - k + t) / t;
        da += binom * a.c[j];
        db += binom * b.c[j] * (((j - k) % 2 == 0) ? 1.0 : -1.0);
      }
      worst = std::max(worst, std::abs(da - db));
    }
  }
  return worst;
}

/// Flux jump of the flux-conservative scheme: interpolated stage fluxes at shared nodes.
template <int M, int NV>
double flux_jump_fc(const Field1D<2 * M + 2, NV>& f, const FluxModel& model, double dt, int stage = 1) {
  const auto cells = fc_cell_fluxes<M, NV>(f, model, dt, stage);
  double worst = 0.0;
  for (int v = 0; v < NV; ++v) {
    std::vector<TaylorPoly<2 * M + 2>> cv;
    cv.reserve(cells.size());
    for (const auto& c : cells) cv.push_back(c[static_cast<std::size_t>(v)]);
    worst = std::max(worst, interface_jump<2 * M + 2>(cv, M, f.grid.periodic));
  }
  return worst;
}

/// Flux jump of the original scheme: per-cell modal u^2/2 at shared nodes.
template <int M>
double flux_jump_original(const Field1D<M + 1, 1>& f) {
  const auto cells = original_cell_fluxes<M>(f);
  return interface_jump<2 * M + 2>(cells, M, f.grid.periodic);
}

// ---------------------------------------------------------------------------
// Writers

struct ConvergenceRow {
  std::string label;
  std::vector<double> errors;
};

/// Table with an h row followed by, per row, an error line and a rate line.
struct ConvergenceTable {
  std::string h_label = "h";
  std::string error_label = "err";
  std::vector<double> h;
  std::vector<ConvergenceRow> rows;
};

namespace detail {

inline std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline std::string fmt_rate(const std::optional<double>& r) {
  if (!r) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *r);
  return buf;
}

inline std::vector<std::optional<double>> row_rates(const ConvergenceTable& t, const ConvergenceRow& row) {
  if (t.h.size() < 2) return std::vector<std::optional<double>>(t.h.size());
  std::vector<std::pair<double, double>> p;
  for (std::size_t i = 0; i < t.h.size(); ++i) p.emplace_back(t.h[i], row.errors.at(i));
  return convergence_rates(p);
}

}  // namespace detail

inline void write_table_csv(std::ostream& os, const ConvergenceTable& t) {
  char buf[40];
  os << t.h_label;
  for (double h : t.h) {
    std::snprintf(buf, sizeof buf, ",%.17g", h);
    os << buf;
  }
  os << "\n";
  for (const auto& row : t.rows) {
    os << t.error_label << " " << row.label;
    for (double e : row.errors) {
      std::snprintf(buf, sizeof buf, ",%.17g", e);
      os << buf;
    }
    os << "\nrate";
    for (const auto& r : detail::row_rates(t, row)) {
      if (r) {
        std::snprintf(buf, sizeof buf, ",%.17g", *r);
        os << buf;
      } else {
        os << ",";
      }
    }
    os << "\n";
  }
}

inline void write_table_text(std::ostream& os, const ConvergenceTable& t) {
  std::size_t w0 = t.h_label.size();
  for (const auto& row : t.rows) w0 = std::max(w0, t.error_label.size() + 1 + row.label.size());
  w0 = std::max<std::size_t>(w0, 4);
  auto cell = [&](const std::string& s, std::size_t w) {
    os << std::string(w > s.size() ? w - s.size() : 0, ' ') << s;
  };
  const std::size_t w = 11;
  os << t.h_label << std::string(w0 - t.h_label.size(), ' ');
  for (double h : t.h) cell(detail::fmt_sci(h), w);
  os << "\n";
  for (const auto& row : t.rows) {
    const std::string lab = t.error_label + " " + row.label;
    os << lab << std::string(w0 - lab.size(), ' ');
    for (double e : row.errors) cell(detail::fmt_sci(e), w);
    os << "\nrate" << std::string(w0 - 4, ' ');
    const auto rates = detail::row_rates(t, row);
    for (std::size_t i = 0; i < rates.size(); ++i) cell(i == 0 ? "" : detail::fmt_rate(rates[i]), w);
    os << "\n";
  }
}

/// Snapshot as CSV: 1D `x,vars...,nu,r`; 2D prefixes a `nx,ny` header pair
/// and adds a y column. Values carry 17 significant digits.
inline void write_snapshot_csv(std::ostream& os, const Snapshot& s, bool with_nu = true) {
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  if (s.dims == 2) os << "nx,ny\n" << s.nx << "," << s.ny << "\n";
  os << "x";
  if (s.dims == 2) os << ",y";
  for (const auto& n : s.names) os << "," << n;
  os << (with_nu ? ",nu,r\n" : "\n");
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    num(s.x[k]);
    if (s.dims == 2) {
      os << ",";
      num(s.y[k]);
    }
    for (const auto& c : s.columns) {
      os << ",";
      num(c[k]);
    }
    if (with_nu) {
      os << ",";
      num(s.nu[k]);
      os << ",";
      num(s.r[k]);
    }
    os << "\n";
  }
}

}  // namespace hermitefc
