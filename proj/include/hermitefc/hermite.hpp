#pragma once
// Staggered grids and two-point Hermite interpolation.
//
// Jets are handed to the interpolation matrices in scaled form: the k-th
// derivative at an endpoint multiplied by s^k / k!, where s is the half-width
// of the target cell. A node polynomial expanded with the same scale carries
// exactly these numbers as its first m+1 coefficients.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hermitefc/errors.hpp"
#include "hermitefc/polyalg.hpp"

namespace hermitefc {

enum class Parity { primal, dual };

inline Parity other(Parity p) { return p == Parity::primal ? Parity::dual : Parity::primal; }

/// Uniform 1D grid. Primal nodes sit at xL + j h, dual nodes at xL + (j + 1/2) h.
/// A periodic primal grid drops the duplicate node at xR.
struct Grid1D {
  double xL = 0.0;
  double xR = 1.0;
  int Nx = 3;
  Parity parity = Parity::primal;
  bool periodic = false;

  Grid1D() = default;
  Grid1D(double xl, double xr, int nx, Parity p, bool per)
      : xL(xl), xR(xr), Nx(nx), parity(p), periodic(per) {
    if (nx < 3) throw ContractError("Grid1D: Nx must be at least 3");
    if (!(xr > xl)) throw ContractError("Grid1D: empty interval");
  }

  double h() const { return (xR - xL) / Nx; }
  int nodes() const { return (parity == Parity::primal && !periodic) ? Nx + 1 : Nx; }
  double x(int j) const {
    return xL + (parity == Parity::primal ? j : j + 0.5) * h();
  }
  Grid1D flipped() const { return Grid1D(xL, xR, Nx, other(parity), periodic); }
};

/// Tensor-product grid; node (i, j) is stored at index i * ny + j.
struct Grid2D {
  Grid1D gx;
  Grid1D gy;

  Grid2D() = default;
  Grid2D(double xl, double xr, int nx, double yb, double yt, int ny, Parity p, bool per)
      : gx(xl, xr, nx, p, per), gy(yb, yt, ny, p, per) {}

  Parity parity() const { return gx.parity; }
  bool periodic() const { return gx.periodic; }
  double hx() const { return gx.h(); }
  double hy() const { return gy.h(); }
  int nx() const { return gx.nodes(); }
  int ny() const { return gy.nodes(); }
  int nodes() const { return nx() * ny(); }
  int index(int i, int j) const { return i * ny() + j; }
  Grid2D flipped() const {
    Grid2D g;
    g.gx = gx.flipped();
    g.gy = gy.flipped();
    return g;
  }
};

namespace detail {

// Solves the two-point Hermite problem on xi in [-1, 1] for every unit jet.
inline std::vector<double> build_interpolation_matrix(int m) {
  const int n = 2 * m + 2;
  std::vector<long double> a(static_cast<std::size_t>(n * n), 0.0L);
  auto A = [&](int r, int c) -> long double& { return a[static_cast<std::size_t>(r * n + c)]; };
  auto binom = [](int i, int k) {
    long double b = 1.0L;
    for (int t = 1; t <= k; ++t) b = b * (i - k + t) / t;
    return b;
  };
  // Row k: p^(k)(-1)/k!; row m+1+k: p^(k)(+1)/k!.
  for (int k = 0; k <= m; ++k) {
    for (int i = k; i < n; ++i) {
      const long double b = binom(i, k);
      A(k, i) = ((i - k) % 2 == 0) ? b : -b;
      A(m + 1 + k, i) = b;
    }
  }
  std::vector<long double> inv(static_cast<std::size_t>(n * n), 0.0L);
  auto I = [&](int r, int c) -> long double& { return inv[static_cast<std::size_t>(r * n + c)]; };
  for (int i = 0; i < n; ++i) I(i, i) = 1.0L;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A(r, col)) > std::fabs(A(piv, col))) piv = r;
    if (piv != col)
      for (int c = 0; c < n; ++c) {
        std::swap(A(col, c), A(piv, c));
        std::swap(I(col, c), I(piv, c));
      }
    const long double d = A(col, col);
    for (int c = 0; c < n; ++c) {
      A(col, c) /= d;
      I(col, c) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = A(r, col);
      if (f == 0.0L) continue;
      for (int c = 0; c < n; ++c) {
        A(r, c) -= f * A(col, c);
        I(r, c) -= f * I(col, c);
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n * n));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<double>(inv[k]);
  return out;
}

}  // namespace detail

inline constexpr int kMaxOrder = 5;

/// Row-major (2m+2) x (2m+2) matrix taking [left jets 0..m, right jets 0..m]
/// to the coefficients of the interpolant in xi.
inline const std::vector<double>& interpolation_matrix(int m) {
  if (m < 1 || m > kMaxOrder) throw ContractError("interpolation_matrix: m must be in 1..5");
  static const std::array<std::vector<double>, kMaxOrder> cache = [] {
    std::array<std::vector<double>, kMaxOrder> c;
    for (int k = 1; k <= kMaxOrder; ++k) c[static_cast<std::size_t>(k - 1)] = detail::build_interpolation_matrix(k);
    return c;
  }();
  return cache[static_cast<std::size_t>(m - 1)];
}

/// Infinity-norm condition number of the jet-to-coefficient map.
inline double interpolation_condition(int m) {
  const int n = 2 * m + 2;
  const auto& h = interpolation_matrix(m);
  // Forward map: coefficients -> scaled jets.
  std::vector<double> fwd(static_cast<std::size_t>(n * n), 0.0);
  for (int k = 0; k <= m; ++k)
    for (int i = k; i < n; ++i) {
      double b = 1.0;
      for (int t = 1; t <= k; ++t) b = b * (i - k + t) / t;
      fwd[static_cast<std::size_t>(k * n + i)] = ((i - k) % 2 == 0) ? b : -b;
      fwd[static_cast<std::size_t>((m + 1 + k) * n + i)] = b;
    }
  auto norm_inf = [n](const std::vector<double>& a) {
    double best = 0.0;
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) s += std::abs(a[static_cast<std::size_t>(r * n + c)]);
      best = std::max(best, s);
    }
    return best;
  };
  return norm_inf(fwd) * norm_inf(h);
}

template <int M>
struct HermiteKernel {
  static_assert(M >= 1 && M <= kMaxOrder);
  static constexpr int N = 2 * M + 2;
  static constexpr int J = M + 1;

  std::array<double, N * N> H{};

  static const HermiteKernel& get() {
    static const HermiteKernel k = [] {
      HermiteKernel r;
      const auto& h = interpolation_matrix(M);
      for (int i = 0; i < N * N; ++i) r.H[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(i)];
      return r;
    }();
    return k;
  }

  /// out[i] = sum_k H(i,k) L[k] + H(i, J+k) R[k]; jets with stride `stride`.
  void apply(const double* __restrict left, const double* __restrict right,
             double* __restrict out, int stride = 1) const {
    double l[J], r[J];
    for (int k = 0; k < J; ++k) {
      l[k] = left[k * stride];
      r[k] = right[k * stride];
    }
    for (int i = 0; i < N; ++i) {
      const double* row = H.data() + i * N;
      double s = 0.0;
      for (int k = 0; k < J; ++k) s += row[k] * l[k] + row[J + k] * r[k];
      out[i * stride] = s;
    }
  }
};

/// Hermite interpolant on the cell between two node polynomials, centered at
/// the midpoint with half-width scale. Inputs must carry at least m+1 coefficients.
template <int M, int NL>
TaylorPoly<2 * M + 2> interpolate_1d(const TaylorPoly<NL>& left, const TaylorPoly<NL>& right) {
  static_assert(NL >= M + 1, "node polynomials must carry m+1 coefficients");
  if (!(right.center > left.center))
    throw ContractError("interpolate_1d: right node must lie to the right of the left node");
  constexpr int J = M + 1;
  const double s = 0.5 * (right.center - left.center);
  double lj[J], rj[J];
  const double fl = s / left.scale, fr = s / right.scale;
  double pl = 1.0, pr = 1.0;
  for (int k = 0; k < J; ++k) {
    lj[k] = left.c[k] * pl;
    rj[k] = right.c[k] * pr;
    pl *= fl;
    pr *= fr;
  }
  TaylorPoly<2 * M + 2> out(0.5 * (left.center + right.center), s);
  HermiteKernel<M>::get().apply(lj, rj, out.c.data());
  return out;
}

/// Corner-jet interpolation on raw coefficient blocks (row length `ld`, at
/// least m+1 rows) that already share the target cell's scales: y along the
/// left and right edges, then x. Writes an N x N block.
template <int M>
void interpolate_2d_raw(const double* bl, const double* br, const double* tl, const double* tr,
                        double* __restrict out, int ld = 2 * M + 2) {
  constexpr int N = 2 * M + 2;
  constexpr int J = M + 1;
  const auto& K = HermiteKernel<M>::get();
  double edges[2 * J * N];
  for (int k = 0; k < J; ++k) {
    K.apply(bl + k * ld, tl + k * ld, edges + k * N);
    K.apply(br + k * ld, tr + k * ld, edges + (J + k) * N);
  }
  for (int l = 0; l < N; ++l) K.apply(edges + l, edges + J * N + l, out + l, N);
}

/// Tensor-product interpolant from the four corners of an axis-aligned cell:
/// y-interpolation along the left and right edges, then x-interpolation.
template <int M>
TensorPoly<2 * M + 2> interpolate_2d(const TensorPoly<2 * M + 2>& bl, const TensorPoly<2 * M + 2>& br,
                                     const TensorPoly<2 * M + 2>& tl, const TensorPoly<2 * M + 2>& tr) {
  constexpr int N = 2 * M + 2;
  constexpr int J = M + 1;
  const double sx = 0.5 * (br.center[0] - bl.center[0]);
  const double sy = 0.5 * (tl.center[1] - bl.center[1]);
  if (!(sx > 0.0 && sy > 0.0)) throw ContractError("interpolate_2d: corners are not an ordered cell");
  const auto& K = HermiteKernel<M>::get();

  auto jet = [&](const TensorPoly<N>& p, int k, int l) {
    return p(k, l) * std::pow(sx / p.scale[0], k) * std::pow(sy / p.scale[1], l);
  };
  const bool fast = bl.scale[0] == sx && bl.scale[1] == sy && br.scale == bl.scale &&
                    tl.scale == bl.scale && tr.scale == bl.scale;

  // Edge rows: E[k][.] are the eta-coefficients of d^k/dx^k (scaled) on an edge.
  std::array<double, 2 * J * N> edges{};
  double lo[J], hi[J];
  for (int side = 0; side < 2; ++side) {
    const TensorPoly<N>& b = side == 0 ? bl : br;
    const TensorPoly<N>& t = side == 0 ? tl : tr;
    for (int k = 0; k < J; ++k) {
      if (fast) {
        K.apply(b.row(k), t.row(k), edges.data() + (side * J + k) * N);
      } else {
        for (int l = 0; l < J; ++l) {
          lo[l] = jet(b, k, l);
          hi[l] = jet(t, k, l);
        }
        K.apply(lo, hi, edges.data() + (side * J + k) * N);
      }
    }
  }
  TensorPoly<N> out({0.5 * (bl.center[0] + br.center[0]), 0.5 * (bl.center[1] + tl.center[1])},
                    {sx, sy});
  // Column l of the result from rows k of the left/right edge blocks.
  for (int l = 0; l < N; ++l) K.apply(edges.data() + l, edges.data() + J * N + l, out.c.data() + l, N);
  return out;
}

/// Drops coefficients above degree m.
template <int M, int N>
TaylorPoly<M + 1> truncate(const TaylorPoly<N>& p) {
  static_assert(N >= M + 1);
  return pad<M + 1>(p);
}

}  // namespace hermitefc
