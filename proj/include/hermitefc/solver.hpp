#pragma once
// Flux-conservative Hermite time stepping on staggered grids.
//
// A half step maps node polynomials on one grid parity to the other. At every
// input node the four RK4 stage fluxes are formed by truncated Taylor
// arithmetic and combined into (F1 + 2F2 + 2F3 + F4)/6; the solution and the
// combined flux are Hermite-interpolated to the output cells and the cell
// polynomial is advanced by -dt/2 times the flux divergence. Neighbouring
// cells share the flux jets at their common node, so the scheme conserves the
// cell sums of u and its first m derivatives.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "hermitefc/errors.hpp"
#include "hermitefc/evisc.hpp"
#include "hermitefc/field.hpp"
#include "hermitefc/hermite.hpp"
#include "hermitefc/parallel.hpp"
#include "hermitefc/physics.hpp"
#include "hermitefc/polyalg.hpp"
#include "hermitefc/problems.hpp"

namespace hermitefc {

// ---------------------------------------------------------------------------
// Stage fluxes at a node.

namespace detail {

template <int To, int From, std::size_t NV>
std::array<TaylorPoly<To>, NV> pad_all(const std::array<TaylorPoly<From>, NV>& q) {
  std::array<TaylorPoly<To>, NV> r;
  for (std::size_t v = 0; v < NV; ++v) r[v] = pad<To>(q[v]);
  return r;
}

template <int To, int From, std::size_t NV>
std::array<TensorPoly<To>, NV> pad_all(const std::array<TensorPoly<From>, NV>& q) {
  std::array<TensorPoly<To>, NV> r;
  for (std::size_t v = 0; v < NV; ++v) r[v] = pad<To, To>(q[v]);
  return r;
}

template <class Node>
void check_stage_state(const FluxModel& model, const Node& a, int stage, double x, double y) {
  const double rho = a[0].c[0];
  if (model.kind == ModelKind::burgers1d) {
    if (!std::isfinite(rho)) throw PositivityError("non-finite Burgers state", x, y, stage);
    return;
  }
  double kinetic = 0.0, E = 0.0;
  if (model.kind == ModelKind::euler2d) {
    kinetic = 0.5 * (a[1].c[0] * a[1].c[0] + a[2].c[0] * a[2].c[0]) / rho;
    E = a[3].c[0];
  } else {
    kinetic = 0.5 * a[1].c[0] * a[1].c[0] / rho;
    E = a[2].c[0];
  }
  const double p = (model.gamma - 1.0) * (E - kinetic);
  if (!(rho > 0.0)) throw PositivityError("nonpositive density " + std::to_string(rho), x, y, stage);
  if (!(p > 0.0)) throw PositivityError("nonpositive pressure " + std::to_string(p), x, y, stage);
}

template <int S, int NV>
std::array<TaylorPoly<S>, NV> stage_flux(const FluxModel& model, const std::array<TaylorPoly<S>, NV>& a, double nu,
                                         int stage) {
  check_stage_state(model, a, stage, a[0].center, 0.0);
  std::array<TaylorPoly<S>, NV> f;
  for (auto& p : f) {
    p.center = a[0].center;
    p.scale = a[0].scale;
  }
  flux_poly<S>(model, std::span<const TaylorPoly<S>>(a), nu, std::span<TaylorPoly<S>>(f));
  return f;
}

template <int S, int NV>
void stage_flux(const FluxModel& model, const std::array<TensorPoly<S>, NV>& a, double nu, int stage,
                std::array<TensorPoly<S>, NV>& f, std::array<TensorPoly<S>, NV>& g) {
  check_stage_state(model, a, stage, a[0].center[0], a[0].center[1]);
  for (std::size_t v = 0; v < NV; ++v) {
    f[v] = TensorPoly<S>(a[0].center, a[0].scale);
    g[v] = f[v];
  }
  flux_poly<S>(model, std::span<const TensorPoly<S>>(a), nu, std::span<TensorPoly<S>>(f),
               std::span<TensorPoly<S>>(g));
}

// q + c (-dF/dx + src), truncated to S coefficients.
template <int S, int N, int SP, std::size_t NV>
std::array<TaylorPoly<S>, NV> stage_argument(const std::array<TaylorPoly<N>, NV>& q,
                                             const std::array<TaylorPoly<SP>, NV>& f, double c,
                                             const std::array<TaylorPoly<N>, NV>* src) {
  std::array<TaylorPoly<S>, NV> r;
  for (std::size_t v = 0; v < NV; ++v) {
    r[v] = pad<S>(q[v]);
    r[v].axpy(-c, pad<S>(derivative(f[v])));
    if (src) r[v].axpy(c, pad<S>((*src)[v]));
  }
  return r;
}

template <int S, int N, int SP, std::size_t NV>
std::array<TensorPoly<S>, NV> stage_argument(const std::array<TensorPoly<N>, NV>& q,
                                             const std::array<TensorPoly<SP>, NV>& f,
                                             const std::array<TensorPoly<SP>, NV>& g, double c,
                                             const std::array<TensorPoly<N>, NV>* src) {
  std::array<TensorPoly<S>, NV> r;
  for (std::size_t v = 0; v < NV; ++v) {
    r[v] = pad<S, S>(q[v]);
    r[v].axpy(-c, pad<S, S>(dx(f[v])));
    r[v].axpy(-c, pad<S, S>(dy(g[v])));
    if (src) r[v].axpy(c, pad<S, S>((*src)[v]));
  }
  return r;
}

template <int J, int S, std::size_t NV, class Poly>
void accumulate_weighted(std::array<Poly, NV>& acc, const std::array<TaylorPoly<S>, NV>& f, double w) {
  for (std::size_t v = 0; v < NV; ++v) acc[v].axpy(w, pad<J>(f[v]));
}

template <int J, int S, std::size_t NV, class Poly>
void accumulate_weighted(std::array<Poly, NV>& acc, const std::array<TensorPoly<S>, NV>& f, double w) {
  for (std::size_t v = 0; v < NV; ++v) acc[v].axpy(w, pad<J, J>(f[v]));
}

// Stage polynomial lengths. Jets 0..m of F4 need F3 up to m+1, and so on
// back to F1; a viscous flux needs one more coefficient of its argument than
// it returns, adding one per stage. Lengths are capped at 2m+2, so the
// result equals the computation carried out at full length throughout.
template <int M, bool Viscous>
struct StageLengths {
  static constexpr int N = 2 * M + 2;
  static constexpr int J = M + 1;
  static constexpr int step = Viscous ? 2 : 1;
  static constexpr int s4 = std::min(N, J + (Viscous ? 1 : 0));
  static constexpr int s3 = std::min(N, s4 + step);
  static constexpr int s2 = std::min(N, s3 + step);
  static constexpr int s1 = std::min(N, s2 + step);
};

template <int M, int NV, int S1, int S2, int S3, int S4>
std::array<TaylorPoly<M + 1>, NV> node_flux_1d_impl(const FluxModel& model,
                                                    const std::array<TaylorPoly<2 * M + 2>, NV>& q, double nu,
                                                    double dth,
                                                    const std::array<TaylorPoly<2 * M + 2>, NV>* src) {
  constexpr int J = M + 1;
  std::array<TaylorPoly<J>, NV> fbar;
  for (auto& p : fbar) {
    p.center = q[0].center;
    p.scale = q[0].scale;
  }
  const auto f1 = stage_flux<S1, NV>(model, pad_all<S1>(q), nu, 1);
  const auto f2 = stage_flux<S2, NV>(model, stage_argument<S2>(q, f1, 0.5 * dth, src), nu, 2);
  const auto f3 = stage_flux<S3, NV>(model, stage_argument<S3>(q, f2, 0.5 * dth, src), nu, 3);
  const auto f4 = stage_flux<S4, NV>(model, stage_argument<S4>(q, f3, dth, src), nu, 4);
  accumulate_weighted<J>(fbar, f1, 1.0 / 6.0);
  accumulate_weighted<J>(fbar, f2, 2.0 / 6.0);
  accumulate_weighted<J>(fbar, f3, 2.0 / 6.0);
  accumulate_weighted<J>(fbar, f4, 1.0 / 6.0);
  return fbar;
}

template <int M, int NV, int S1, int S2, int S3, int S4>
void node_flux_2d_impl(const FluxModel& model, const std::array<TensorPoly<2 * M + 2>, NV>& q, double nu,
                       double dth, const std::array<TensorPoly<2 * M + 2>, NV>* src,
                       std::array<TensorPoly<M + 1>, NV>& fbar, std::array<TensorPoly<M + 1>, NV>& gbar) {
  constexpr int J = M + 1;
  for (int v = 0; v < NV; ++v) {
    fbar[v] = TensorPoly<J>(q[0].center, q[0].scale);
    gbar[v] = fbar[v];
  }
  std::array<TensorPoly<S1>, NV> f1, g1;
  std::array<TensorPoly<S2>, NV> f2, g2;
  std::array<TensorPoly<S3>, NV> f3, g3;
  std::array<TensorPoly<S4>, NV> f4, g4;
  stage_flux<S1, NV>(model, pad_all<S1>(q), nu, 1, f1, g1);
  stage_flux<S2, NV>(model, stage_argument<S2>(q, f1, g1, 0.5 * dth, src), nu, 2, f2, g2);
  stage_flux<S3, NV>(model, stage_argument<S3>(q, f2, g2, 0.5 * dth, src), nu, 3, f3, g3);
  stage_flux<S4, NV>(model, stage_argument<S4>(q, f3, g3, dth, src), nu, 4, f4, g4);
  accumulate_weighted<J>(fbar, f1, 1.0 / 6.0);
  accumulate_weighted<J>(fbar, f2, 2.0 / 6.0);
  accumulate_weighted<J>(fbar, f3, 2.0 / 6.0);
  accumulate_weighted<J>(fbar, f4, 1.0 / 6.0);
  accumulate_weighted<J>(gbar, g1, 1.0 / 6.0);
  accumulate_weighted<J>(gbar, g2, 2.0 / 6.0);
  accumulate_weighted<J>(gbar, g3, 2.0 / 6.0);
  accumulate_weighted<J>(gbar, g4, 1.0 / 6.0);
}

}  // namespace detail

/// RK4-weighted node flux jets (F1 + 2F2 + 2F3 + F4)/6, orders 0..m, for a
/// half step of length dth = dt/2.
template <int M, int NV>
std::array<TaylorPoly<M + 1>, NV> node_flux_1d(const FluxModel& model, const std::array<TaylorPoly<2 * M + 2>, NV>& q,
                                               double nu, double dth,
                                               const std::array<TaylorPoly<2 * M + 2>, NV>* src = nullptr) {
  if (nu != 0.0) {
    using L = detail::StageLengths<M, true>;
    return detail::node_flux_1d_impl<M, NV, L::s1, L::s2, L::s3, L::s4>(model, q, nu, dth, src);
  }
  using L = detail::StageLengths<M, false>;
  return detail::node_flux_1d_impl<M, NV, L::s1, L::s2, L::s3, L::s4>(model, q, nu, dth, src);
}

/// Same combination with every stage carried at the full length 2m+2.
template <int M, int NV>
std::array<TaylorPoly<M + 1>, NV> node_flux_1d_full(const FluxModel& model,
                                                    const std::array<TaylorPoly<2 * M + 2>, NV>& q, double nu,
                                                    double dth,
                                                    const std::array<TaylorPoly<2 * M + 2>, NV>* src = nullptr) {
  constexpr int N = 2 * M + 2;
  return detail::node_flux_1d_impl<M, NV, N, N, N, N>(model, q, nu, dth, src);
}

template <int M, int NV>
void node_flux_2d(const FluxModel& model, const std::array<TensorPoly<2 * M + 2>, NV>& q, double nu, double dth,
                  const std::array<TensorPoly<2 * M + 2>, NV>* src, std::array<TensorPoly<M + 1>, NV>& fbar,
                  std::array<TensorPoly<M + 1>, NV>& gbar) {
  if (nu != 0.0) {
    using L = detail::StageLengths<M, true>;
    detail::node_flux_2d_impl<M, NV, L::s1, L::s2, L::s3, L::s4>(model, q, nu, dth, src, fbar, gbar);
  } else {
    using L = detail::StageLengths<M, false>;
    detail::node_flux_2d_impl<M, NV, L::s1, L::s2, L::s3, L::s4>(model, q, nu, dth, src, fbar, gbar);
  }
}

template <int M, int NV>
void node_flux_2d_full(const FluxModel& model, const std::array<TensorPoly<2 * M + 2>, NV>& q, double nu,
                       double dth, const std::array<TensorPoly<2 * M + 2>, NV>* src,
                       std::array<TensorPoly<M + 1>, NV>& fbar, std::array<TensorPoly<M + 1>, NV>& gbar) {
  constexpr int N = 2 * M + 2;
  detail::node_flux_2d_impl<M, NV, N, N, N, N>(model, q, nu, dth, src, fbar, gbar);
}

// ---------------------------------------------------------------------------
// Half steps.

/// Input-grid nodes bounding output node j along one axis. Returns false for
/// a node held at its initial value (ends of a non-periodic primal grid).
inline bool cell_neighbors(const Grid1D& out, int j, int& left, int& right) {
  const int n = out.Nx;
  if (out.parity == Parity::dual) {
    left = j;
    right = out.periodic ? (j + 1) % n : j + 1;
    return true;
  }
  if (out.periodic) {
    left = (j - 1 + n) % n;
    right = j;
    return true;
  }
  if (j == 0 || j == n) return false;
  left = j - 1;
  right = j;
  return true;
}

inline constexpr int kMaxMoment = 2 * kMaxOrder + 1;

/// Per half step sums over output cells of the integral of d^k u / dx^k
/// (axis 0) or d^k u / dy^k (axis 1): of the interpolant before the update,
/// after the update, and of the absolute cell values before the update.
struct MomentProbe {
  int kmax = 4;
  using Table = std::array<std::array<std::array<double, kMaxMoment + 1>, 2>, 4>;
  Table before{};
  Table after{};
  Table magnitude{};
  void clear() {
    before = {};
    after = {};
    magnitude = {};
  }
  /// max over variables, axes of |after - before| / magnitude for moment k.
  double relative_drift(int k, int nvar, int naxes) const {
    double worst = 0.0;
    for (int v = 0; v < nvar; ++v)
      for (int a = 0; a < naxes; ++a) {
        const double mag = magnitude[v][a][k];
        const double d = std::abs(after[v][a][k] - before[v][a][k]);
        worst = std::max(worst, mag > 0.0 ? d / mag : d);
      }
    return worst;
  }
};

template <class Field>
struct HalfStepOptions {
  /// Viscosity per input node; empty means inviscid.
  std::span<const double> nu;
  /// Field on the output parity whose held (boundary) nodes are copied.
  const Field* boundary = nullptr;
  /// Source polynomials on the input and output grids.
  const std::vector<typename Field::Node>* source_in = nullptr;
  const std::vector<typename Field::Node>* source_out = nullptr;
  MomentProbe* probe = nullptr;
};

template <int M, int NV>
Field1D<2 * M + 2, NV> half_step_fc_1d(const Field1D<2 * M + 2, NV>& a, const FluxModel& model, double dt,
                                      const HalfStepOptions<Field1D<2 * M + 2, NV>>& opt = {}) {
  constexpr int N = 2 * M + 2;
  constexpr int J = M + 1;
  using F = Field1D<N, NV>;
  const double dth = 0.5 * dt;
  if (!opt.nu.empty() && static_cast<int>(opt.nu.size()) != a.size())
    throw ContractError("half_step_fc_1d: viscosity size differs from node count");
  F b(a.grid.flipped(), a.time + dth);
  std::vector<std::array<TaylorPoly<J>, NV>> fbar(static_cast<std::size_t>(a.size()));
  parallel_for(a.size(), [&](int j) {
    const auto k = static_cast<std::size_t>(j);
    const double nu = opt.nu.empty() ? 0.0 : opt.nu[k];
    fbar[k] = node_flux_1d<M, NV>(model, a.node[k], nu, dth, opt.source_in ? &(*opt.source_in)[k] : nullptr);
  });
  const auto& K = HermiteKernel<M>::get();
  const double s = 0.5 * b.grid.h();
  parallel_for(b.size(), [&](int j) {
    const auto k = static_cast<std::size_t>(j);
    int l, r;
    auto& out = b.node[k];
    if (!cell_neighbors(b.grid, j, l, r)) {
      if (!opt.boundary) throw ContractError("half_step_fc_1d: fixed boundary needs a boundary field");
      out = opt.boundary->node[k];
      return;
    }
    for (int v = 0; v < NV; ++v) {
      double ud[N], fd[N];
      K.apply(a.node[static_cast<std::size_t>(l)][v].c.data(), a.node[static_cast<std::size_t>(r)][v].c.data(), ud);
      K.apply(fbar[static_cast<std::size_t>(l)][v].c.data(), fbar[static_cast<std::size_t>(r)][v].c.data(), fd);
      auto& c = out[v].c;
      for (int i = 0; i < N - 1; ++i) c[i] = ud[i] - dth * (i + 1) * fd[i + 1] / s;
      c[N - 1] = ud[N - 1];
      if (opt.source_out) out[v].axpy(dth, (*opt.source_out)[k][v]);
    }
  });
  if (opt.probe) {
    auto& pr = *opt.probe;
    for (int j = 0; j < b.size(); ++j) {
      int l, r;
      if (!cell_neighbors(b.grid, j, l, r)) continue;
      for (int v = 0; v < NV; ++v) {
        TaylorPoly<N> ud(b.grid.x(j), s);
        K.apply(a.node[static_cast<std::size_t>(l)][v].c.data(), a.node[static_cast<std::size_t>(r)][v].c.data(),
                ud.c.data());
        for (int kk = 0; kk <= pr.kmax; ++kk) {
          const double m0 = cell_moment(ud, kk);
          pr.before[v][0][kk] += m0;
          pr.magnitude[v][0][kk] += std::abs(m0);
          pr.after[v][0][kk] += cell_moment(b.node[static_cast<std::size_t>(j)][v], kk);
        }
      }
    }
  }
  return b;
}

template <int M, int NV>
Field2D<2 * M + 2, NV> half_step_fc_2d(const Field2D<2 * M + 2, NV>& a, const FluxModel& model, double dt,
                                      const HalfStepOptions<Field2D<2 * M + 2, NV>>& opt = {}) {
  constexpr int N = 2 * M + 2;
  constexpr int J = M + 1;
  using F = Field2D<N, NV>;
  const double dth = 0.5 * dt;
  if (!opt.nu.empty() && static_cast<int>(opt.nu.size()) != a.size())
    throw ContractError("half_step_fc_2d: viscosity size differs from node count");
  F b(a.grid.flipped(), a.time + dth);
  std::vector<std::array<TensorPoly<J>, NV>> fbar(static_cast<std::size_t>(a.size()));
  std::vector<std::array<TensorPoly<J>, NV>> gbar(static_cast<std::size_t>(a.size()));
  parallel_for(a.size(), [&](int idx) {
    const auto k = static_cast<std::size_t>(idx);
    const double nu = opt.nu.empty() ? 0.0 : opt.nu[k];
    node_flux_2d<M, NV>(model, a.node[k], nu, dth, opt.source_in ? &(*opt.source_in)[k] : nullptr, fbar[k], gbar[k]);
  });
  const double sx = 0.5 * b.grid.hx(), sy = 0.5 * b.grid.hy();
  const int nyb = b.grid.ny();
  auto corners = [&](int idx, std::array<int, 4>& c) {
    const int i = idx / nyb, j = idx % nyb;
    int il, ir, jb, jt;
    if (!cell_neighbors(b.grid.gx, i, il, ir) || !cell_neighbors(b.grid.gy, j, jb, jt)) return false;
    c = {a.grid.index(il, jb), a.grid.index(ir, jb), a.grid.index(il, jt), a.grid.index(ir, jt)};
    return true;
  };
  parallel_for(b.size(), [&](int idx) {
    const auto k = static_cast<std::size_t>(idx);
    auto& out = b.node[k];
    std::array<int, 4> c;
    if (!corners(idx, c)) {
      if (!opt.boundary) throw ContractError("half_step_fc_2d: fixed boundary needs a boundary field");
      out = opt.boundary->node[k];
      return;
    }
    const auto bl = static_cast<std::size_t>(c[0]), br = static_cast<std::size_t>(c[1]);
    const auto tl = static_cast<std::size_t>(c[2]), tr = static_cast<std::size_t>(c[3]);
    for (int v = 0; v < NV; ++v) {
      double ud[N * N], fd[N * N], gd[N * N];
      interpolate_2d_raw<M>(a.node[bl][v].c.data(), a.node[br][v].c.data(), a.node[tl][v].c.data(),
                            a.node[tr][v].c.data(), ud, N);
      interpolate_2d_raw<M>(fbar[bl][v].c.data(), fbar[br][v].c.data(), fbar[tl][v].c.data(),
                            fbar[tr][v].c.data(), fd, J);
      interpolate_2d_raw<M>(gbar[bl][v].c.data(), gbar[br][v].c.data(), gbar[tl][v].c.data(),
                            gbar[tr][v].c.data(), gd, J);
      auto& o = out[v].c;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          double div = 0.0;
          if (i + 1 < N) div += (i + 1) * fd[(i + 1) * N + j] / sx;
          if (j + 1 < N) div += (j + 1) * gd[i * N + j + 1] / sy;
          o[i * N + j] = ud[i * N + j] - dth * div;
        }
      if (opt.source_out) out[v].axpy(dth, (*opt.source_out)[k][v]);
    }
  });
  if (opt.probe) {
    auto& pr = *opt.probe;
    for (int idx = 0; idx < b.size(); ++idx) {
      std::array<int, 4> c;
      if (!corners(idx, c)) continue;
      const auto& ref = b.node[static_cast<std::size_t>(idx)];
      for (int v = 0; v < NV; ++v) {
        TensorPoly<N> ud(ref[v].center, ref[v].scale);
        interpolate_2d_raw<M>(a.node[static_cast<std::size_t>(c[0])][v].c.data(),
                              a.node[static_cast<std::size_t>(c[1])][v].c.data(),
                              a.node[static_cast<std::size_t>(c[2])][v].c.data(),
                              a.node[static_cast<std::size_t>(c[3])][v].c.data(), ud.c.data(), N);
        for (int axis = 0; axis < 2; ++axis)
          for (int kk = 0; kk <= pr.kmax; ++kk) {
            const double m0 = cell_moment(ud, kk, axis);
            pr.before[v][axis][kk] += m0;
            pr.magnitude[v][axis][kk] += std::abs(m0);
            pr.after[v][axis][kk] += cell_moment(ref[v], kk, axis);
          }
      }
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Original Hermite scheme (1D Burgers): degree-m jets at the nodes, the cell
// interpolant is evolved by RK4 on its own coefficient ODE and truncated.

namespace detail {

template <int N>
void burgers_cell_rhs(const std::array<double, N>& c, double s, std::array<double, N>& out) {
  std::array<double, N> b{};
  for (int k = 0; k < N; ++k) {
    double acc = 0.0;
    for (int l = 0; l <= k; ++l) acc += c[l] * c[k - l];
    b[k] = 0.5 * acc;
  }
  for (int k = 0; k < N - 1; ++k) out[k] = -(k + 1) * b[k + 1] / s;
  out[N - 1] = 0.0;
}

}  // namespace detail

template <int M>
Field1D<M + 1, 1> half_step_original_1d(const Field1D<M + 1, 1>& a, double dt,
                                        const Field1D<M + 1, 1>* boundary = nullptr) {
  constexpr int N = 2 * M + 2;
  const double dth = 0.5 * dt;
  Field1D<M + 1, 1> b(a.grid.flipped(), a.time + dth);
  const auto& K = HermiteKernel<M>::get();
  const double s = 0.5 * b.grid.h();
  for (int j = 0; j < b.size(); ++j) {
    int l, r;
    if (!cell_neighbors(b.grid, j, l, r)) {
      if (!boundary) throw ContractError("half_step_original_1d: fixed boundary needs a boundary field");
      b.node[static_cast<std::size_t>(j)] = boundary->node[static_cast<std::size_t>(j)];
      continue;
    }
    std::array<double, N> c{}, k1, k2, k3, k4, tmp;
    K.apply(a.node[static_cast<std::size_t>(l)][0].c.data(), a.node[static_cast<std::size_t>(r)][0].c.data(),
            c.data());
    detail::burgers_cell_rhs<N>(c, s, k1);
    for (int i = 0; i < N; ++i) tmp[i] = c[i] + 0.5 * dth * k1[i];
    detail::burgers_cell_rhs<N>(tmp, s, k2);
    for (int i = 0; i < N; ++i) tmp[i] = c[i] + 0.5 * dth * k2[i];
    detail::burgers_cell_rhs<N>(tmp, s, k3);
    for (int i = 0; i < N; ++i) tmp[i] = c[i] + dth * k3[i];
    detail::burgers_cell_rhs<N>(tmp, s, k4);
    auto& out = b.node[static_cast<std::size_t>(j)][0];
    for (int i = 0; i <= M; ++i) out.c[i] = c[i] + dth / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return b;
}

/// Per-cell flux polynomials u^2/2 of the original scheme on output cells.
template <int M>
std::vector<TaylorPoly<2 * M + 2>> original_cell_fluxes(const Field1D<M + 1, 1>& a) {
  constexpr int N = 2 * M + 2;
  const Grid1D g = a.grid.flipped();
  const auto& K = HermiteKernel<M>::get();
  std::vector<TaylorPoly<N>> out;
  for (int j = 0; j < g.nodes(); ++j) {
    int l, r;
    if (!cell_neighbors(g, j, l, r)) continue;
    TaylorPoly<N> u(g.x(j), 0.5 * g.h());
    K.apply(a.node[static_cast<std::size_t>(l)][0].c.data(), a.node[static_cast<std::size_t>(r)][0].c.data(),
            u.c.data());
    auto f = mul_trunc(u, u);
    f *= 0.5;
    out.push_back(f);
  }
  return out;
}

/// Per-cell interpolated stage flux F_stage (1..4) of the flux-conservative scheme on output cells.
template <int M, int NV>
std::vector<std::array<TaylorPoly<2 * M + 2>, NV>> fc_cell_fluxes(const Field1D<2 * M + 2, NV>& a,
                                                                 const FluxModel& model, double dt, int stage) {
  constexpr int N = 2 * M + 2;
  constexpr int J = M + 1;
  if (stage < 1 || stage > 4) throw ContractError("fc_cell_fluxes: stage must be 1..4");
  const double dth = 0.5 * dt;
  const std::array<TaylorPoly<N>, NV>* no_source = nullptr;
  std::vector<std::array<TaylorPoly<J>, NV>> jets(static_cast<std::size_t>(a.size()));
  for (int j = 0; j < a.size(); ++j) {
    const auto& q = a.node[static_cast<std::size_t>(j)];
    auto f = detail::stage_flux<N, NV>(model, q, 0.0, 1);
    for (int st = 2; st <= stage; ++st)
      f = detail::stage_flux<N, NV>(model, detail::stage_argument<N>(q, f, st == 4 ? dth : 0.5 * dth, no_source),
                                    0.0, st);
    jets[static_cast<std::size_t>(j)] = detail::pad_all<J>(f);
  }
  const Grid1D g = a.grid.flipped();
  const auto& K = HermiteKernel<M>::get();
  std::vector<std::array<TaylorPoly<N>, NV>> out;
  for (int j = 0; j < g.nodes(); ++j) {
    int l, r;
    if (!cell_neighbors(g, j, l, r)) continue;
    std::array<TaylorPoly<N>, NV> cell;
    for (int v = 0; v < NV; ++v) {
      cell[v] = TaylorPoly<N>(g.x(j), 0.5 * g.h());
      K.apply(jets[static_cast<std::size_t>(l)][v].c.data(), jets[static_cast<std::size_t>(r)][v].c.data(),
              cell[v].c.data());
    }
    out.push_back(cell);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time step and run driver.

/// cfl * min(hx, hy) / max wave speed of the field.
template <class Field>
double cfl_timestep(const Field& f, const FluxModel& model, double cfl) {
  if (!(cfl > 0.0)) throw ContractError("cfl_timestep: cfl must be positive");
  const double speed = max_wave_speed(f, model);
  if (!(speed > 0.0)) throw ConfigError("zero wave speed in the initial data; the time step is undefined");
  double h = 0.0;
  if constexpr (requires { f.grid.hx(); })
    h = std::min(f.grid.hx(), f.grid.hy());
  else
    h = f.grid.h();
  return cfl * h / speed;
}

/// Pointwise node data handed to snapshot consumers.
struct Snapshot {
  double time = 0.0;
  long step = 0;
  int dims = 1;
  int nx = 0, ny = 1;
  std::vector<double> x, y;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<double> nu, r;

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return columns[k];
    throw ContractError("Snapshot: no column '" + name + "'");
  }
};

struct RunRecord {
  double dt = 0.0;
  long steps = 0;
  double time = 0.0;
  double max_nu = 0.0;
  bool viscous_dt_warning = false;
  std::vector<std::string> warnings;
  double initial_mass = 0.0;
  double final_mass = 0.0;
  /// Mass added by the sponge (the jet forcing acts on momentum only).
  double sponge_mass = 0.0;
  /// Sum over steps of |mass change by the sponge|.
  double sponge_mass_activity = 0.0;
  /// Largest per-half-step relative moment drift, index k (periodic runs with probing).
  std::vector<double> moment_drift;
};

using SnapshotCallback = std::function<void(const Snapshot&)>;

/// Mass integral over the domain: full cells for periodic grids, boundary
/// half-cells clipped to the domain otherwise.
template <class Field>
double field_mass(const Field& f) {
  double m = 0.0;
  if constexpr (requires { f.grid.hx(); }) {
    const auto& g = f.grid;
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        const auto& p = f.node[static_cast<std::size_t>(g.index(i, j))][0];
        if (g.periodic()) {
          m += integrate_cell(p);
        } else {
          const double xa = std::max(g.gx.xL, p.center[0] - p.scale[0]);
          const double xb = std::min(g.gx.xR, p.center[0] + p.scale[0]);
          const double ya = std::max(g.gy.xL, p.center[1] - p.scale[1]);
          const double yb = std::min(g.gy.xR, p.center[1] + p.scale[1]);
          m += integrate_range(p, xa, xb, ya, yb);
        }
      }
  } else {
    for (const auto& node : f.node) {
      const auto& p = node[0];
      if (f.grid.periodic)
        m += integrate_cell(p);
      else
        m += integrate_range(p, std::max(f.grid.xL, p.center - p.scale), std::min(f.grid.xR, p.center + p.scale));
    }
  }
  return m;
}

template <int M, class FieldT>
class Solver {
 public:
  using Field = FieldT;
  static constexpr int N = 2 * M + 2;
  static constexpr int NV = Field::nvar;
  static constexpr bool two_d = std::is_same_v<Field, Field2D<N, NV>>;
  static_assert(Field::ncoef == N);

  explicit Solver(const ProblemSpec& spec) : spec_(spec) {
    validate(spec_);
    if (spec_.m != M) throw ContractError("Solver: order mismatch");
    if (spec_.model.nvar() != NV || (spec_.dims() == 2) != two_d) throw ContractError("Solver: model mismatch");
    init_[0] = make_initial(Parity::primal);
    init_[1] = make_initial(Parity::dual);
    current_ = init_[0];
    record_.dt = 0.0;
    if (spec_.t_final > 0.0) {
      const double dt0 = cfl_timestep(current_, spec_.model, spec_.cfl);
      steps_ = static_cast<long>(std::ceil(spec_.t_final / dt0 - 1e-9));
      steps_ = std::max(steps_, 1L);
      dt_ = spec_.t_final / static_cast<double>(steps_);
    }
    record_.dt = dt_;
    if (spec_.forcing.amplitude != 0.0) {
      for (int p = 0; p < 2; ++p) source_[p] = jet_forcing<N, NV>(init_[p].grid, spec_.forcing);
      has_source_ = true;
    }
    record_.initial_mass = field_mass(current_);
    record_.final_mass = record_.initial_mass;
  }

  const ProblemSpec& spec() const { return spec_; }
  const Field& field() const { return current_; }
  const Field& initial(Parity p) const { return init_[p == Parity::primal ? 0 : 1]; }
  double dt() const { return dt_; }
  /// Number of full steps needed to reach t_final.
  long total_steps() const { return steps_; }
  long steps_taken() const { return taken_; }
  const ViscosityField& viscosity_field() const { return visc_; }
  const RunRecord& record() const { return record_; }
  /// Enables per-half-step moment bookkeeping up to derivative order kmax.
  void enable_probe(int kmax) {
    probing_ = true;
    probe_kmax_ = kmax;
    record_.moment_drift.assign(static_cast<std::size_t>(kmax + 1), 0.0);
  }
  void set_dt(double dt) {
    if (taken_ > 0 || half_ > 0) throw ContractError("Solver: dt fixed once stepping started");
    dt_ = dt;
    record_.dt = dt;
  }

  void half_step() {
    const int p = parity_index();
    compute_viscosity(p);
    HalfStepOptions<Field> opt;
    if (spec_.ev.enabled()) opt.nu = visc_.nu;
    opt.boundary = &init_[1 - p];
    std::vector<typename Field::Node> work_in;
    if (has_source_) {
      work_in = with_work(source_[p], current_);
      opt.source_in = &work_in;
      opt.source_out = &source_[1 - p];
    }
    MomentProbe probe;
    probe.kmax = probe_kmax_;
    if (probing_) opt.probe = &probe;
    Field next;
    if constexpr (two_d)
      next = half_step_fc_2d<M, NV>(current_, spec_.model, dt_, opt);
    else
      next = half_step_fc_1d<M, NV>(current_, spec_.model, dt_, opt);
    if (has_source_) add_work(source_[1 - p], next, 0.5 * dt_);
    if (has_sponge()) {
      const double dm = apply_sponge(next, spec_, 0.5 * dt_);
      record_.sponge_mass += dm;
      record_.sponge_mass_activity += std::abs(dm);
    }
    if (probing_)
      for (int k = 0; k <= probe_kmax_; ++k)
        record_.moment_drift[static_cast<std::size_t>(k)] =
            std::max(record_.moment_drift[static_cast<std::size_t>(k)], probe.relative_drift(k, NV, two_d ? 2 : 1));
    current_ = std::move(next);
    ++half_;
    check_finite();
  }

  void full_step() {
    half_step();
    half_step();
    ++taken_;
    current_.time = static_cast<double>(taken_) * dt_;
    record_.steps = taken_;
    record_.time = current_.time;
    record_.final_mass = field_mass(current_);
  }

  /// Steps to t_final (or max_full_steps when nonnegative). Snapshots are
  /// emitted at the first full step reaching each requested time.
  void run(const std::vector<double>& snapshot_times = {}, const SnapshotCallback& cb = {},
           long max_full_steps = -1) {
    if (steps_ > spec_.max_steps)
      throw SolverAbort("run needs " + std::to_string(steps_) + " steps, above max_steps " +
                            std::to_string(spec_.max_steps),
                        0);
    std::vector<double> pending = snapshot_times;
    std::sort(pending.begin(), pending.end());
    std::size_t next = 0;
    auto emit_due = [&] {
      while (next < pending.size() && current_.time >= pending[next] - 0.5 * dt_) {
        if (cb) cb(snapshot());
        ++next;
      }
    };
    emit_due();
    const long limit = max_full_steps >= 0 ? std::min(max_full_steps, steps_) : steps_;
    while (taken_ < limit) {
      try {
        full_step();
      } catch (const PositivityError& e) {
        throw PositivityError(std::string(e.what()) + " at step " + std::to_string(taken_ + 1) + " (x=" +
                                  std::to_string(e.x()) + ", y=" + std::to_string(e.y()) + ", stage " +
                                  std::to_string(e.stage()) + ")",
                              e.x(), e.y(), e.stage());
      }
      emit_due();
    }
  }

  /// Pointwise conserved and primitive values at the current nodes.
  Snapshot snapshot() const {
    Snapshot s;
    s.time = current_.time;
    s.step = taken_;
    s.dims = two_d ? 2 : 1;
    const int n = current_.size();
    if constexpr (two_d) {
      s.nx = current_.grid.nx();
      s.ny = current_.grid.ny();
    } else {
      s.nx = n;
      s.ny = 1;
    }
    const auto& model = spec_.model;
    switch (model.kind) {
      case ModelKind::burgers1d: s.names = {"u"}; break;
      case ModelKind::euler1d: s.names = {"rho", "rho_u", "E", "u", "p"}; break;
      case ModelKind::euler2d: s.names = {"rho", "rho_u", "rho_v", "E", "u", "v", "p"}; break;
    }
    s.columns.assign(s.names.size(), std::vector<double>(static_cast<std::size_t>(n)));
    s.x.resize(static_cast<std::size_t>(n));
    s.y.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>(j);
      const auto& p0 = current_.node[k][0];
      if constexpr (two_d) {
        s.x[k] = p0.center[0];
        s.y[k] = p0.center[1];
      } else {
        s.x[k] = p0.center;
      }
      const auto q = current_.state(j);
      for (int v = 0; v < NV; ++v) s.columns[static_cast<std::size_t>(v)][k] = q[static_cast<std::size_t>(v)];
      if (model.is_euler()) {
        const double rho = q[0];
        const double u = q[1] / rho;
        const double v = two_d ? q[2] / rho : 0.0;
        const double E = q[two_d ? 3 : 2];
        const double pr = (model.gamma - 1.0) * (E - 0.5 * rho * (u * u + v * v));
        std::size_t c = NV;
        s.columns[c++][k] = u;
        if (two_d) s.columns[c++][k] = v;
        s.columns[c][k] = pr;
      }
    }
    if (static_cast<int>(visc_.nu.size()) == n) {
      s.nu = visc_.nu;
      s.r = visc_.r;
    } else {
      s.nu.assign(static_cast<std::size_t>(n), 0.0);
      s.r.assign(static_cast<std::size_t>(n), 0.0);
    }
    return s;
  }

 private:
  int parity_index() const {
    if constexpr (two_d)
      return current_.grid.parity() == Parity::primal ? 0 : 1;
    else
      return current_.grid.parity == Parity::primal ? 0 : 1;
  }

  Field make_initial(Parity p) const {
    if constexpr (two_d)
      return initial_field_2d<N, NV>(spec_, p);
    else
      return initial_field<N, NV>(spec_, p);
  }

  static constexpr std::size_t kEnergy = NV - 1;

  static bool forced(const typename Field::Node& src) {
    if constexpr (NV < 3) return false;
    for (double c : src[1].c)
      if (c != 0.0) return true;
    return false;
  }

  /// Power f u of the x-momentum forcing f at the velocity u of node q.
  static auto work(const typename Field::Node& src, const typename Field::Node& q) {
    return mul_trunc(src[1], div_trunc(q[1], q[0]));
  }

  /// Forcing with its energy source taken from the state f.
  std::vector<typename Field::Node> with_work(const std::vector<typename Field::Node>& src, const Field& f) const {
    auto out = src;
    if constexpr (NV >= 3)
      for (std::size_t k = 0; k < out.size(); ++k)
        if (forced(src[k])) out[k][kEnergy] = work(src[k], f.node[k]);
    return out;
  }

  void add_work(const std::vector<typename Field::Node>& src, Field& f, double dth) const {
    if constexpr (NV >= 3)
      for (std::size_t k = 0; k < src.size(); ++k)
        if (forced(src[k])) f.node[k][kEnergy].axpy(dth, work(src[k], f.node[k]));
  }

  bool has_sponge() const { return spec_.forcing.sponge_width > 0.0 && spec_.forcing.sponge_strength > 0.0; }

  double mesh_h() const {
    if constexpr (two_d)
      return std::min(current_.grid.hx(), current_.grid.hy());
    else
      return current_.grid.h();
  }

  void compute_viscosity(int parity) {
    if (!spec_.ev.enabled()) {
      visc_ = {};
      return;
    }
    const int n = current_.size();
    std::vector<double> rho(static_cast<std::size_t>(n)), S(rho.size()), us(rho.size()), vs(rho.size()),
        u(rho.size()), v(rho.size());
    double max_speed = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>(j);
      const auto& p0 = current_.node[k][0];
      double x = 0.0, y = 0.0;
      if constexpr (two_d) {
        x = p0.center[0];
        y = p0.center[1];
      } else {
        x = p0.center;
      }
      const auto prim = conservative_to_primitive(current_.state(j), spec_.model, x, y);
      const auto e = entropy_pair(prim, spec_.model);
      rho[k] = prim.rho;
      S[k] = e.S;
      us[k] = e.uS;
      vs[k] = e.vS;
      u[k] = prim.u;
      v[k] = prim.v;
      max_speed = std::max(max_speed, wave_speed(prim, spec_.model));
    }
    const double h = mesh_h();
    auto& hist = history_[parity];
    if (hist.valid_steps() < 2) {
      visc_ = startup_viscosity(rho, spec_.ev, h, max_speed);
    } else {
      std::vector<double> r, du;
      if constexpr (two_d) {
        r = entropy_residual(S, hist, us, vs, current_.grid, dt_);
        if (spec_.ev.use_delta_u) du = delta_u(u, v, current_.grid);
      } else {
        r = entropy_residual(S, hist, us, current_.grid, dt_);
        if (spec_.ev.use_delta_u) du = delta_u(u, current_.grid);
      }
      visc_ = viscosity(r, rho, spec_.ev, h, max_speed, du);
    }
    hist.push(S, dt_);
    double numax = 0.0;
    for (double x : visc_.nu) numax = std::max(numax, x);
    record_.max_nu = std::max(record_.max_nu, numax);
    double hmin = h;
    if constexpr (two_d) hmin = std::min(current_.grid.hx(), current_.grid.hy());
    if (spec_.viscous_dt_guard && !record_.viscous_dt_warning && numax > 0.0 && dt_ > 0.25 * hmin * hmin / numax) {
      record_.viscous_dt_warning = true;
      record_.warnings.push_back("time step " + std::to_string(dt_) + " exceeds the viscous limit h^2/(4 nu) = " +
                                 std::to_string(0.25 * hmin * hmin / numax) + " at t = " +
                                 std::to_string(current_.time));
    }
  }

  void check_finite() const {
    for (const auto& node : current_.node)
      for (const auto& p : node)
        if (!std::isfinite(p.c[0]))
          throw SolverAbort("non-finite value after half step " + std::to_string(half_), taken_ + 1);
  }

  ProblemSpec spec_;
  std::array<Field, 2> init_;
  Field current_;
  std::array<std::vector<typename Field::Node>, 2> source_;
  bool has_source_ = false;
  std::array<EntropyHistory, 2> history_;
  ViscosityField visc_;
  RunRecord record_;
  double dt_ = 0.0;
  long steps_ = 0;
  long taken_ = 0;
  long half_ = 0;
  bool probing_ = false;
  int probe_kmax_ = 4;
};

}  // namespace hermitefc
