#pragma once
// Truncated Taylor polynomials in scaled local coordinates.
//
// A TaylorPoly<N> holds the N coefficients of sum_k c[k] xi^k where
// xi = (x - center) / scale. Solution and flux polynomials use N = 2m+2 and
// scale = h/2, so the "cell" of a polynomial is [center - scale, center + scale]
// and xi ranges over [-1, 1] on it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include "hermitefc/errors.hpp"

namespace hermitefc {

namespace detail {

inline bool same_chart(double c1, double s1, double c2, double s2) {
  return c1 == c2 && s1 == s2;
}

// Relative threshold below which a constant term is treated as zero in division.
inline constexpr double kDegenerateLeading = 1e-14;

}  // namespace detail

template <int N>
struct TaylorPoly {
  static_assert(N >= 1, "TaylorPoly needs at least one coefficient");
  static constexpr int size = N;
  static constexpr int degree = N - 1;

  std::array<double, N> c{};
  double center = 0.0;
  double scale = 1.0;

  constexpr TaylorPoly() = default;
  constexpr TaylorPoly(double center_, double scale_) : center(center_), scale(scale_) {}
  constexpr TaylorPoly(const std::array<double, N>& coeffs, double center_ = 0.0,
                       double scale_ = 1.0)
      : c(coeffs), center(center_), scale(scale_) {}

  double& operator[](int k) { return c[static_cast<std::size_t>(k)]; }
  double operator[](int k) const { return c[static_cast<std::size_t>(k)]; }

  static TaylorPoly constant(double v, double center = 0.0, double scale = 1.0) {
    TaylorPoly p(center, scale);
    p.c[0] = v;
    return p;
  }

  /// The identity map x, expanded about `center`.
  static TaylorPoly variable(double center, double scale) {
    TaylorPoly p(center, scale);
    p.c[0] = center;
    if constexpr (N > 1) p.c[1] = scale;
    return p;
  }

  TaylorPoly& operator+=(const TaylorPoly& o) {
    for (int k = 0; k < N; ++k) c[k] += o.c[k];
    return *this;
  }
  TaylorPoly& operator-=(const TaylorPoly& o) {
    for (int k = 0; k < N; ++k) c[k] -= o.c[k];
    return *this;
  }
  TaylorPoly& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  /// this += a * o
  TaylorPoly& axpy(double a, const TaylorPoly& o) {
    for (int k = 0; k < N; ++k) c[k] += a * o.c[k];
    return *this;
  }
};

template <int N>
TaylorPoly<N> operator+(TaylorPoly<N> a, const TaylorPoly<N>& b) { return a += b; }
template <int N>
TaylorPoly<N> operator-(TaylorPoly<N> a, const TaylorPoly<N>& b) { return a -= b; }
template <int N>
TaylorPoly<N> operator*(double s, TaylorPoly<N> a) { return a *= s; }
template <int N>
TaylorPoly<N> operator*(TaylorPoly<N> a, double s) { return a *= s; }

template <int N>
double eval_scaled(const TaylorPoly<N>& p, double xi) {
  double r = p.c[N - 1];
  for (int k = N - 2; k >= 0; --k) r = r * xi + p.c[k];
  return r;
}

template <int N>
double eval(const TaylorPoly<N>& p, double x) {
  return eval_scaled(p, (x - p.center) / p.scale);
}

/// d/dx in physical units; the degree drops by one.
template <int N>
auto derivative(const TaylorPoly<N>& p) {
  if constexpr (N == 1) {
    return TaylorPoly<1>(p.center, p.scale);
  } else {
    TaylorPoly<N - 1> d(p.center, p.scale);
    const double inv = 1.0 / p.scale;
    for (int k = 0; k < N - 1; ++k) d.c[k] = (k + 1) * p.c[k + 1] * inv;
    return d;
  }
}

/// Zero-extends or truncates to M coefficients.
template <int M, int N>
TaylorPoly<M> pad(const TaylorPoly<N>& p) {
  TaylorPoly<M> r(p.center, p.scale);
  for (int k = 0; k < std::min(M, N); ++k) r.c[k] = p.c[k];
  return r;
}

/// Integral over the polynomial's own cell [center - scale, center + scale].
template <int N>
double integrate_cell(const TaylorPoly<N>& p) {
  double s = 0.0;
  for (int k = 0; k < N; k += 2) s += 2.0 * p.c[k] / (k + 1);
  return p.scale * s;
}

/// Integral over an arbitrary physical interval [a, b].
template <int N>
double integrate_range(const TaylorPoly<N>& p, double a, double b) {
  const double xa = (a - p.center) / p.scale;
  const double xb = (b - p.center) / p.scale;
  double pa = xa, pb = xb, s = 0.0;
  for (int k = 0; k < N; ++k) {
    s += p.c[k] * (pb - pa) / (k + 1);
    pa *= xa;
    pb *= xb;
  }
  return p.scale * s;
}

/// Cauchy product truncated to OutN coefficients.
template <int OutN, int N1, int N2>
TaylorPoly<OutN> mul_trunc(const TaylorPoly<N1>& p, const TaylorPoly<N2>& q) {
  if (!detail::same_chart(p.center, p.scale, q.center, q.scale))
    throw ContractError("mul_trunc: operands expanded in different charts");
  TaylorPoly<OutN> r(p.center, p.scale);
  for (int i = 0; i < N1 && i < OutN; ++i) {
    const double pi = p.c[i];
    const int jmax = std::min(N2, OutN - i);
    for (int j = 0; j < jmax; ++j) r.c[i + j] += pi * q.c[j];
  }
  return r;
}

template <int N>
TaylorPoly<N> mul_trunc(const TaylorPoly<N>& p, const TaylorPoly<N>& q) {
  return mul_trunc<N, N, N>(p, q);
}

/// r with mul_trunc(q, r) == p through OutN coefficients.
template <int OutN, int N1, int N2>
TaylorPoly<OutN> div_trunc(const TaylorPoly<N1>& p, const TaylorPoly<N2>& q) {
  if (!detail::same_chart(p.center, p.scale, q.center, q.scale))
    throw ContractError("div_trunc: operands expanded in different charts");
  double qmax = 0.0;
  for (double v : q.c) qmax = std::max(qmax, std::abs(v));
  if (!(std::abs(q.c[0]) >= detail::kDegenerateLeading * qmax) || q.c[0] == 0.0)
    throw DegenerateDivision("div_trunc: divisor has a degenerate constant term");
  TaylorPoly<OutN> r(p.center, p.scale);
  const double inv = 1.0 / q.c[0];
  for (int k = 0; k < OutN; ++k) {
    double s = k < N1 ? p.c[k] : 0.0;
    const int lmax = std::min(k, N2 - 1);
    for (int l = 1; l <= lmax; ++l) s -= q.c[l] * r.c[k - l];
    r.c[k] = s * inv;
  }
  return r;
}

template <int N>
TaylorPoly<N> div_trunc(const TaylorPoly<N>& p, const TaylorPoly<N>& q) {
  return div_trunc<N, N, N>(p, q);
}

// ---------------------------------------------------------------------------
// Tensor-product polynomials: sum_{i,j} c(i,j) xi^i eta^j.

template <int NX, int NY = NX>
struct TensorPoly {
  static_assert(NX >= 1 && NY >= 1);
  static constexpr int size_x = NX;
  static constexpr int size_y = NY;

  std::array<double, NX * NY> c{};
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> scale{1.0, 1.0};

  constexpr TensorPoly() = default;
  constexpr TensorPoly(std::array<double, 2> center_, std::array<double, 2> scale_)
      : center(center_), scale(scale_) {}

  double& operator()(int i, int j) { return c[static_cast<std::size_t>(i * NY + j)]; }
  double operator()(int i, int j) const { return c[static_cast<std::size_t>(i * NY + j)]; }
  double* row(int i) { return c.data() + i * NY; }
  const double* row(int i) const { return c.data() + i * NY; }

  static TensorPoly constant(double v, std::array<double, 2> center = {0.0, 0.0},
                             std::array<double, 2> scale = {1.0, 1.0}) {
    TensorPoly p(center, scale);
    p.c[0] = v;
    return p;
  }

  TensorPoly& operator+=(const TensorPoly& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
    return *this;
  }
  TensorPoly& operator-=(const TensorPoly& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] -= o.c[k];
    return *this;
  }
  TensorPoly& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  TensorPoly& axpy(double a, const TensorPoly& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += a * o.c[k];
    return *this;
  }
};

template <int NX, int NY>
TensorPoly<NX, NY> operator+(TensorPoly<NX, NY> a, const TensorPoly<NX, NY>& b) {
  return a += b;
}
template <int NX, int NY>
TensorPoly<NX, NY> operator-(TensorPoly<NX, NY> a, const TensorPoly<NX, NY>& b) {
  return a -= b;
}
template <int NX, int NY>
TensorPoly<NX, NY> operator*(double s, TensorPoly<NX, NY> a) {
  return a *= s;
}

namespace detail {

template <int NX, int NY>
void check_chart(const TensorPoly<NX, NY>& p, const TensorPoly<NX, NY>& q, const char* op) {
  if (p.center != q.center || p.scale != q.scale)
    throw ContractError(std::string(op) + ": operands expanded in different charts");
}

// out[0..N) += s * q[0..N-l) shifted by l, i.e. the truncated 1D Cauchy product row kernel.
// q preceded by N zeros, so every shifted copy is a full-length vector.
template <int N>
struct ZeroPadded {
  alignas(64) double v[2 * N] = {};
  ZeroPadded() = default;
  explicit ZeroPadded(const double* q) {
    for (int j = 0; j < N; ++j) v[N + j] = q[j];
  }
};

template <int N, int Sign>
inline void conv_padded(double* __restrict out, const double* __restrict p, const ZeroPadded<N>& q) {
  double acc[N];
#pragma GCC unroll 16
  for (int j = 0; j < N; ++j) acc[j] = 0.0;
#pragma GCC unroll 16
  for (int l = 0; l < N; ++l) {
    const double s = p[l];
    const double* src = q.v + N - l;
#pragma GCC unroll 16
    for (int j = 0; j < N; ++j) acc[j] += s * src[j];
  }
#pragma GCC unroll 16
  for (int j = 0; j < N; ++j) out[j] += Sign * acc[j];
}

template <int N>
inline void conv_accumulate(double* __restrict out, const double* __restrict p,
                            const double* __restrict q) {
  conv_padded<N, 1>(out, p, ZeroPadded<N>(q));
}

template <int N>
inline void conv_subtract(double* __restrict out, const double* __restrict p,
                          const double* __restrict q) {
  conv_padded<N, -1>(out, p, ZeroPadded<N>(q));
}

}  // namespace detail

template <int NX, int NY>
double eval2_scaled(const TensorPoly<NX, NY>& p, double xi, double eta) {
  double r = 0.0;
  for (int i = NX - 1; i >= 0; --i) {
    const double* row = p.row(i);
    double s = row[NY - 1];
    for (int j = NY - 2; j >= 0; --j) s = s * eta + row[j];
    r = r * xi + s;
  }
  return r;
}

template <int NX, int NY>
double eval2(const TensorPoly<NX, NY>& p, double x, double y) {
  return eval2_scaled(p, (x - p.center[0]) / p.scale[0], (y - p.center[1]) / p.scale[1]);
}

template <int NX, int NY>
auto dx(const TensorPoly<NX, NY>& p) {
  if constexpr (NX == 1) {
    return TensorPoly<1, NY>(p.center, p.scale);
  } else {
    TensorPoly<NX - 1, NY> d(p.center, p.scale);
    const double inv = 1.0 / p.scale[0];
    for (int i = 0; i < NX - 1; ++i)
      for (int j = 0; j < NY; ++j) d(i, j) = (i + 1) * p(i + 1, j) * inv;
    return d;
  }
}

template <int NX, int NY>
auto dy(const TensorPoly<NX, NY>& p) {
  if constexpr (NY == 1) {
    return TensorPoly<NX, 1>(p.center, p.scale);
  } else {
    TensorPoly<NX, NY - 1> d(p.center, p.scale);
    const double inv = 1.0 / p.scale[1];
    for (int i = 0; i < NX; ++i)
      for (int j = 0; j < NY - 1; ++j) d(i, j) = (j + 1) * p(i, j + 1) * inv;
    return d;
  }
}

template <int MX, int MY, int NX, int NY>
TensorPoly<MX, MY> pad(const TensorPoly<NX, NY>& p) {
  TensorPoly<MX, MY> r(p.center, p.scale);
  for (int i = 0; i < std::min(MX, NX); ++i)
    for (int j = 0; j < std::min(MY, NY); ++j) r(i, j) = p(i, j);
  return r;
}

/// d/dx with the result zero-padded back to the input shape.
template <int NX, int NY>
TensorPoly<NX, NY> dx_padded(const TensorPoly<NX, NY>& p) {
  TensorPoly<NX, NY> d(p.center, p.scale);
  const double inv = 1.0 / p.scale[0];
  for (int i = 0; i < NX - 1; ++i)
    for (int j = 0; j < NY; ++j) d(i, j) = (i + 1) * p(i + 1, j) * inv;
  return d;
}

template <int NX, int NY>
TensorPoly<NX, NY> dy_padded(const TensorPoly<NX, NY>& p) {
  TensorPoly<NX, NY> d(p.center, p.scale);
  const double inv = 1.0 / p.scale[1];
  for (int i = 0; i < NX; ++i)
    for (int j = 0; j < NY - 1; ++j) d(i, j) = (j + 1) * p(i, j + 1) * inv;
  return d;
}

template <int N>
TaylorPoly<N> derivative_padded(const TaylorPoly<N>& p) {
  TaylorPoly<N> d(p.center, p.scale);
  const double inv = 1.0 / p.scale;
  for (int k = 0; k < N - 1; ++k) d.c[k] = (k + 1) * p.c[k + 1] * inv;
  return d;
}

/// Tensor product truncated per axis to the operand shape.
template <int NX, int NY>
TensorPoly<NX, NY> mul_trunc(const TensorPoly<NX, NY>& p, const TensorPoly<NX, NY>& q) {
  detail::check_chart(p, q, "mul_trunc2");
  TensorPoly<NX, NY> r(p.center, p.scale);
  for (int a = 0; a < NX; ++a) {
    const detail::ZeroPadded<NY> qa(q.row(a));
    for (int k = 0; k + a < NX; ++k) detail::conv_padded<NY, 1>(r.row(k + a), p.row(k), qa);
  }
  return r;
}

template <int NX, int NY>
TensorPoly<NX, NY> div_trunc(const TensorPoly<NX, NY>& p, const TensorPoly<NX, NY>& q) {
  detail::check_chart(p, q, "div_trunc2");
  double qmax = 0.0;
  for (double v : q.c) qmax = std::max(qmax, std::abs(v));
  if (!(std::abs(q.c[0]) >= detail::kDegenerateLeading * qmax) || q.c[0] == 0.0)
    throw DegenerateDivision("div_trunc2: divisor has a degenerate constant term");

  // 1 / Q_0(eta), the reciprocal of the xi^0 row.
  std::array<double, NY> inv0{};
  {
    const double* q0 = q.row(0);
    const double inv = 1.0 / q0[0];
    for (int j = 0; j < NY; ++j) {
      double s = j == 0 ? 1.0 : 0.0;
      for (int l = 1; l <= j; ++l) s -= q0[l] * inv0[j - l];
      inv0[j] = s * inv;
    }
  }
  // Row recurrence: sum_{k<=i} Q_k * R_{i-k} = P_i.
  TensorPoly<NX, NY> r(p.center, p.scale);
  const detail::ZeroPadded<NY> inv0_padded(inv0.data());
  std::array<detail::ZeroPadded<NY>, NX> r_padded{};
  std::array<double, NY> rhs{};
  for (int i = 0; i < NX; ++i) {
    // Independent accumulators keep the FMA chains short.
    double acc[4][NY] = {};
    int lane = 0;
    for (int k = 1; k <= i; ++k) {
      const double* qk = q.row(k);
      const double* rp = r_padded[i - k].v;
#pragma GCC unroll 16
      for (int l = 0; l < NY; ++l) {
        const double s = qk[l];
        const double* src = rp + NY - l;
        double* a = acc[lane];
#pragma GCC unroll 16
        for (int j = 0; j < NY; ++j) a[j] += s * src[j];
        lane = (lane + 1) & 3;
      }
    }
#pragma GCC unroll 16
    for (int j = 0; j < NY; ++j) rhs[j] = p.row(i)[j] - ((acc[0][j] + acc[1][j]) + (acc[2][j] + acc[3][j]));
    detail::conv_padded<NY, 1>(r.row(i), rhs.data(), inv0_padded);
    r_padded[i] = detail::ZeroPadded<NY>(r.row(i));
  }
  return r;
}

template <int NX, int NY>
double integrate_cell(const TensorPoly<NX, NY>& p) {
  double s = 0.0;
  for (int i = 0; i < NX; i += 2)
    for (int j = 0; j < NY; j += 2) s += 4.0 * p(i, j) / ((i + 1) * (j + 1));
  return p.scale[0] * p.scale[1] * s;
}

/// Integral over the physical rectangle [xa, xb] x [ya, yb].
template <int NX, int NY>
double integrate_range(const TensorPoly<NX, NY>& p, double xa, double xb, double ya, double yb) {
  std::array<double, NX> wx{};
  std::array<double, NY> wy{};
  {
    const double a = (xa - p.center[0]) / p.scale[0], b = (xb - p.center[0]) / p.scale[0];
    double pa = a, pb = b;
    for (int i = 0; i < NX; ++i) {
      wx[i] = (pb - pa) / (i + 1);
      pa *= a;
      pb *= b;
    }
  }
  {
    const double a = (ya - p.center[1]) / p.scale[1], b = (yb - p.center[1]) / p.scale[1];
    double pa = a, pb = b;
    for (int j = 0; j < NY; ++j) {
      wy[j] = (pb - pa) / (j + 1);
      pa *= a;
      pb *= b;
    }
  }
  double s = 0.0;
  for (int i = 0; i < NX; ++i)
    for (int j = 0; j < NY; ++j) s += p(i, j) * wx[i] * wy[j];
  return p.scale[0] * p.scale[1] * s;
}

/// (px(xi) * py(eta)) as a tensor polynomial.
template <int NX, int NY>
TensorPoly<NX, NY> outer(const TaylorPoly<NX>& px, const TaylorPoly<NY>& py) {
  TensorPoly<NX, NY> r({px.center, py.center}, {px.scale, py.scale});
  for (int i = 0; i < NX; ++i)
    for (int j = 0; j < NY; ++j) r(i, j) = px.c[i] * py.c[j];
  return r;
}

/// Integral over the polynomial's cell of its k-th derivative (physical units).
template <int N>
double cell_moment(const TaylorPoly<N>& p, int k) {
  if (k == 0) return integrate_cell(p);
  // int_{-1}^{1} d^k/dxi^k p dxi = [d^{k-1}/dxi^{k-1} p]_{-1}^{1}
  double s = 0.0;
  for (int i = k; i < N; ++i) {
    if ((i - k + 1) % 2 == 0) continue;
    double f = 1.0;
    for (int t = i - k + 2; t <= i; ++t) f *= t;
    s += 2.0 * f * p.c[i];
  }
  return s / std::pow(p.scale, k - 1);
}

/// Integral over the cell of d^k/dx^k (axis 0) or d^k/dy^k (axis 1).
template <int NX, int NY>
double cell_moment(const TensorPoly<NX, NY>& p, int k, int axis) {
  std::array<double, NX> wx{};
  std::array<double, NY> wy{};
  auto weights = [](double* w, int n, int kk, double scale) {
    for (int i = 0; i < n; ++i) {
      if (kk == 0) {
        w[i] = (i % 2 == 0) ? 2.0 / (i + 1) : 0.0;
        continue;
      }
      w[i] = 0.0;
      if (i < kk || (i - kk + 1) % 2 == 0) continue;
      double f = 1.0;
      for (int t = i - kk + 2; t <= i; ++t) f *= t;
      w[i] = 2.0 * f / std::pow(scale, kk);
    }
  };
  weights(wx.data(), NX, axis == 0 ? k : 0, p.scale[0]);
  weights(wy.data(), NY, axis == 1 ? k : 0, p.scale[1]);
  double s = 0.0;
  for (int i = 0; i < NX; ++i)
    for (int j = 0; j < NY; ++j) s += p(i, j) * wx[i] * wy[j];
  return p.scale[0] * p.scale[1] * s;
}

// Names used for the 2D operations elsewhere in the library.
template <int NX, int NY>
TensorPoly<NX, NY> mul_trunc2(const TensorPoly<NX, NY>& p, const TensorPoly<NX, NY>& q) {
  return mul_trunc(p, q);
}
template <int NX, int NY>
TensorPoly<NX, NY> div_trunc2(const TensorPoly<NX, NY>& p, const TensorPoly<NX, NY>& q) {
  return div_trunc(p, q);
}
template <int NX, int NY>
double integrate_cell2(const TensorPoly<NX, NY>& p) {
  return integrate_cell(p);
}

// ---------------------------------------------------------------------------
// Analytic functions of polynomials (truncated Taylor arithmetic). Used to
// generate exact derivative jets of initial data and forcing profiles.

namespace detail {

template <int N>
constexpr int nilpotency(const TaylorPoly<N>*) { return N; }
template <int NX, int NY>
constexpr int nilpotency(const TensorPoly<NX, NY>*) { return NX + NY - 1; }

}  // namespace detail

/// f(p) given taylor[n] = f^(n)(p0) / n!, n = 0.. ; the series in (p - p0) terminates.
template <class Poly>
Poly compose(const Poly& p, std::span<const double> taylor) {
  constexpr int terms = detail::nilpotency(static_cast<const Poly*>(nullptr));
  Poly w = p;
  w.c[0] = 0.0;
  const int n = std::min<int>(terms, static_cast<int>(taylor.size()));
  Poly r = p;
  r.c.fill(0.0);
  for (int k = n - 1; k >= 0; --k) {
    r = mul_trunc(w, r);
    r.c[0] += taylor[static_cast<std::size_t>(k)];
  }
  return r;
}

namespace detail {
template <class Poly>
constexpr int series_len() {
  return nilpotency(static_cast<const Poly*>(nullptr));
}
}  // namespace detail

template <class Poly>
Poly exp(const Poly& p) {
  constexpr int n = detail::series_len<Poly>();
  std::array<double, n> t{};
  const double e = std::exp(p.c[0]);
  double fact = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) fact *= k;
    t[k] = e / fact;
  }
  return compose(p, std::span<const double>(t));
}

template <class Poly>
Poly sin(const Poly& p) {
  constexpr int n = detail::series_len<Poly>();
  std::array<double, n> t{};
  const double s = std::sin(p.c[0]), co = std::cos(p.c[0]);
  const double cyc[4] = {s, co, -s, -co};
  double fact = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) fact *= k;
    t[k] = cyc[k % 4] / fact;
  }
  return compose(p, std::span<const double>(t));
}

template <class Poly>
Poly cos(const Poly& p) {
  constexpr int n = detail::series_len<Poly>();
  std::array<double, n> t{};
  const double s = std::sin(p.c[0]), co = std::cos(p.c[0]);
  const double cyc[4] = {co, -s, -co, s};
  double fact = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) fact *= k;
    t[k] = cyc[k % 4] / fact;
  }
  return compose(p, std::span<const double>(t));
}

/// p^alpha for real alpha; requires p0 > 0 unless alpha is a nonnegative integer.
template <class Poly>
Poly pow(const Poly& p, double alpha) {
  constexpr int n = detail::series_len<Poly>();
  std::array<double, n> t{};
  const double x0 = p.c[0];
  double coef = 1.0;  // alpha (alpha-1) ... (alpha-k+1) / k!
  for (int k = 0; k < n; ++k) {
    if (k > 0) coef *= (alpha - (k - 1)) / k;
    t[k] = coef == 0.0 ? 0.0 : coef * std::pow(x0, alpha - k);
  }
  return compose(p, std::span<const double>(t));
}

}  // namespace hermitefc
