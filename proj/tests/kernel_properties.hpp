#pragma once
// Randomized property checks for the polynomial and Hermite kernels. Each
// check compares the library against an independent oracle written here
// (naive sums, full convolutions, Gauss quadrature, divided differences) and
// reports the worst deviation over its instances.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hermitefc/hermite.hpp"
#include "hermitefc/polyalg.hpp"

namespace hermitefc::testing {

struct PropertyResult {
  std::string name;
  double worst = 0.0;
  double tol = 0.0;
  int instances = 0;
  bool pass() const { return std::isfinite(worst) && worst <= tol; }
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }
  template <int N>
  TaylorPoly<N> poly(double center = 0.0, double scale = 1.0) {
    TaylorPoly<N> p(center, scale);
    for (auto& c : p.c) c = uniform(-1.0, 1.0);
    return p;
  }
  template <int NX, int NY = NX>
  TensorPoly<NX, NY> tensor(std::array<double, 2> center = {0.0, 0.0}, std::array<double, 2> scale = {1.0, 1.0}) {
    TensorPoly<NX, NY> p(center, scale);
    for (auto& c : p.c) c = uniform(-1.0, 1.0);
    return p;
  }

 private:
  std::mt19937_64 gen_;
};

// 4-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr std::array<double, 4> kGaussX{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                               0.8611363115940526};
inline constexpr std::array<double, 4> kGaussW{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                               0.3478548451374538};

/// Composite 16-panel x 4-point Gauss rule (64 points) on [a, b].
template <class F>
double gauss64(F&& f, double a, double b) {
  const int panels = 16;
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * w;
    for (int q = 0; q < 4; ++q) s += kGaussW[q] * f(mid + 0.5 * w * kGaussX[q]);
  }
  return 0.5 * w * s;
}

/// Naive power sum sum_k c_k xi^k.
template <int N>
double naive_eval(const TaylorPoly<N>& p, double x) {
  const double xi = (x - p.center) / p.scale;
  double s = 0.0;
  for (int k = 0; k < N; ++k) s += p.c[k] * std::pow(xi, k);
  return s;
}

template <int NX, int NY>
double naive_eval2(const TensorPoly<NX, NY>& p, double x, double y) {
  const double xi = (x - p.center[0]) / p.scale[0], eta = (y - p.center[1]) / p.scale[1];
  double s = 0.0;
  for (int i = 0; i < NX; ++i)
    for (int j = 0; j < NY; ++j) s += p(i, j) * std::pow(xi, i) * std::pow(eta, j);
  return s;
}

/// k-th xi-derivative of p at xi, divided by k!.
template <int N>
double scaled_jet(const TaylorPoly<N>& p, int k, double xi) {
  double s = 0.0;
  for (int i = k; i < N; ++i) {
    double b = 1.0;
    for (int t = 1; t <= k; ++t) b = b * (i - k + t) / t;
    s += b * p.c[i] * std::pow(xi, i - k);
  }
  return s;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------------

inline std::vector<PropertyResult> polyalg_properties(int instances, std::uint64_t seed) {
  constexpr int N = 8;
  Rng rng(seed);
  std::vector<PropertyResult> out;
  out.reserve(16);
  auto add = [&](const std::string& name, double tol) -> PropertyResult& {
    out.push_back({name, 0.0, tol, instances});
    return out.back();
  };

  auto& p_eval = add("eval matches naive power sum", 1e-13);
  auto& p_deriv = add("derivative matches central difference", 1e-6);
  auto& p_int = add("integrate_cell matches 64-point Gauss", 1e-12);
  auto& p_mul = add("mul_trunc equals truncated full convolution", 1e-14);
  auto& p_comm = add("mul_trunc commutative, bilinear, unit", 1e-14);
  auto& p_div = add("div_trunc multiply-back (q0 = 2)", 1e-12);
  auto& p_divmul = add("div_trunc inverts mul_trunc", 1e-12);
  auto& p_anti = add("derivative of antiderivative recovers p", 1e-13);
  auto& p_mono = add("integrate_cell exact on monomials", 1e-15);
  auto& t_eval = add("eval2 matches naive double sum", 1e-13);
  auto& t_deriv = add("dx, dy match central differences", 1e-6);
  auto& t_mul = add("mul_trunc2 equals truncated 2D convolution", 1e-14);
  auto& t_div = add("div_trunc2 multiply-back", 1e-12);
  auto& t_int = add("integrate_cell2 matches tensor Gauss", 1e-12);

  for (int it = 0; it < instances; ++it) {
    const double center = rng.uniform(-3.0, 3.0), scale = rng.uniform(0.25, 2.0);
    const auto p = rng.poly<N>(center, scale);
    const auto q = rng.poly<N>(center, scale);

    for (int k = 0; k < 20; ++k) {
      const double x = center + scale * rng.uniform(-1.5, 1.5);
      p_eval.worst = std::max(p_eval.worst, rel(eval(p, x), naive_eval(p, x)));
    }
    {
      const auto d = derivative(p);
      for (int k = 0; k < 10; ++k) {
        const double x = center + scale * rng.uniform(-1.0, 1.0);
        const double h = 1e-6;
        const double fd = (naive_eval(p, x + h) - naive_eval(p, x - h)) / (2.0 * h);
        p_deriv.worst = std::max(p_deriv.worst, std::abs(eval(d, x) - fd) * scale);
      }
    }
    {
      const double g = gauss64([&](double x) { return naive_eval(p, x); }, center - scale, center + scale);
      p_int.worst = std::max(p_int.worst, rel(integrate_cell(p), g));
    }
    {
      std::array<double, 2 * N - 1> full{};
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) full[i + j] += p.c[i] * q.c[j];
      const auto r = mul_trunc(p, q);
      for (int k = 0; k < N; ++k) p_mul.worst = std::max(p_mul.worst, rel(r.c[k], full[k]));
    }
    {
      const auto pq = mul_trunc(p, q), qp = mul_trunc(q, p);
      const double a = rng.uniform(-2.0, 2.0);
      const auto s = rng.poly<N>(center, scale);
      const auto lhs = mul_trunc(p + a * s, q);
      const auto rhs = pq + a * mul_trunc(s, q);
      const auto one = TaylorPoly<N>::constant(1.0, center, scale);
      const auto unit = mul_trunc(p, one);
      for (int k = 0; k < N; ++k) {
        p_comm.worst = std::max(p_comm.worst, std::abs(pq.c[k] - qp.c[k]));
        p_comm.worst = std::max(p_comm.worst, rel(lhs.c[k], rhs.c[k]) * 0.25);
        p_comm.worst = std::max(p_comm.worst, std::abs(unit.c[k] - p.c[k]));
      }
    }
    {
      auto d = q;
      d.c[0] = 2.0;
      const auto r = div_trunc(p, d);
      const auto back = mul_trunc(d, r);
      for (int k = 0; k < N; ++k) p_div.worst = std::max(p_div.worst, rel(back.c[k], p.c[k]));
      const auto again = div_trunc(mul_trunc(p, d), d);
      for (int k = 0; k < N; ++k) p_divmul.worst = std::max(p_divmul.worst, rel(again.c[k], p.c[k]));
    }
    {
      // Antiderivative in physical units: a_{k+1} = c_k scale / (k + 1).
      TaylorPoly<N + 1> a(center, scale);
      a.c[0] = rng.uniform(-1.0, 1.0);
      for (int k = 0; k < N; ++k) a.c[k + 1] = p.c[k] * scale / (k + 1);
      const auto d = derivative(a);
      for (int k = 0; k < N; ++k) p_anti.worst = std::max(p_anti.worst, rel(d.c[k], p.c[k]));
    }
    if (it < N) {
      TaylorPoly<N> mono(center, scale);
      mono.c[it] = 1.0;
      const double exact = (it % 2 == 0) ? 2.0 * scale / (it + 1) : 0.0;
      p_mono.worst = std::max(p_mono.worst, std::abs(integrate_cell(mono) - exact));
    }

    // Tensor polynomials.
    const std::array<double, 2> c2{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    const std::array<double, 2> s2{rng.uniform(0.25, 2.0), rng.uniform(0.25, 2.0)};
    const auto P = rng.tensor<N>(c2, s2);
    const auto Q = rng.tensor<N>(c2, s2);
    for (int k = 0; k < 5; ++k) {
      const double x = c2[0] + s2[0] * rng.uniform(-1.0, 1.0), y = c2[1] + s2[1] * rng.uniform(-1.0, 1.0);
      t_eval.worst = std::max(t_eval.worst, rel(eval2(P, x, y), naive_eval2(P, x, y)));
      const double h = 1e-6;
      const double fx = (naive_eval2(P, x + h, y) - naive_eval2(P, x - h, y)) / (2.0 * h);
      const double fy = (naive_eval2(P, x, y + h) - naive_eval2(P, x, y - h)) / (2.0 * h);
      t_deriv.worst = std::max(t_deriv.worst, std::abs(eval2(dx(P), x, y) - fx) * s2[0]);
      t_deriv.worst = std::max(t_deriv.worst, std::abs(eval2(dy(P), x, y) - fy) * s2[1]);
    }
    {
      std::array<double, (2 * N - 1) * (2 * N - 1)> full{};
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k)
            for (int l = 0; l < N; ++l) full[(i + k) * (2 * N - 1) + j + l] += P(i, j) * Q(k, l);
      const auto R = mul_trunc2(P, Q);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) t_mul.worst = std::max(t_mul.worst, rel(R(i, j), full[i * (2 * N - 1) + j]));
    }
    {
      auto D = Q;
      D(0, 0) = 3.0;
      const auto R = div_trunc2(P, D);
      const auto back = mul_trunc2(D, R);
      for (int k = 0; k < N * N; ++k) t_div.worst = std::max(t_div.worst, rel(back.c[k], P.c[k]));
    }
    {
      const double g = gauss64(
          [&](double x) {
            return gauss64([&](double y) { return naive_eval2(P, x, y); }, c2[1] - s2[1], c2[1] + s2[1]);
          },
          c2[0] - s2[0], c2[0] + s2[0]);
      t_int.worst = std::max(t_int.worst, rel(integrate_cell2(P), g));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Newton form of the two-point Hermite interpolant on [a, b] with each
/// endpoint repeated m+1 times; f^(k)/k! given in physical units.
inline double newton_hermite(const std::vector<double>& ja, const std::vector<double>& jb, double a, double b,
                             double x) {
  const int J = static_cast<int>(ja.size());
  const int n = 2 * J;
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = i < J ? a : b;
  // Divided-difference table, column by column.
  std::vector<std::vector<double>> dd(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) dd[static_cast<std::size_t>(i)][0] = i < J ? ja[0] : jb[0];
  for (int k = 1; k < n; ++k)
    for (int i = 0; i + k < n; ++i) {
      const double za = z[static_cast<std::size_t>(i)], zb = z[static_cast<std::size_t>(i + k)];
      double v;
      if (za == zb) {
        v = (za == a ? ja : jb)[static_cast<std::size_t>(k)];
      } else {
        v = (dd[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(k - 1)] -
             dd[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)]) /
            (zb - za);
      }
      dd[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = v;
    }
  double s = dd[0][static_cast<std::size_t>(n - 1)];
  for (int k = n - 2; k >= 0; --k) s = s * (x - z[static_cast<std::size_t>(k)]) + dd[0][static_cast<std::size_t>(k)];
  return s;
}

namespace detail_props {

template <int M>
void hermite_order(Rng& rng, std::vector<PropertyResult>& out, int instances) {
  constexpr int N = 2 * M + 2;
  constexpr int J = M + 1;
  auto& reprod = out[0];
  auto& match = out[1];
  auto& trunc = out[3];
  auto& reprod2 = out[4];
  auto& order2 = out[5];
  for (int it = 0; it < instances; ++it) {
    const double xa = rng.uniform(-2.0, 2.0), h = rng.uniform(0.05, 1.0);
    const double s = 0.5 * h, mid = xa + s;
    // Reproduction: a degree-(2m+1) polynomial about the midpoint, re-expanded at the nodes.
    const auto P = rng.poly<N>(mid, s);
    auto node_poly = [&](double at) {
      TaylorPoly<N> r(at, s);
      const double xi = (at - mid) / s;
      for (int k = 0; k < N; ++k) r.c[k] = scaled_jet(P, k, xi);
      return r;
    };
    const auto L = node_poly(xa), R = node_poly(xa + h);
    const auto I = interpolate_1d<M>(L, R);
    for (int k = 0; k < N; ++k) reprod.worst = std::max(reprod.worst, rel(I.c[k], P.c[k]));

    // Jet matching on random jets.
    TaylorPoly<J> jl(xa, s), jr(xa + h, s);
    for (auto& c : jl.c) c = rng.uniform(-1.0, 1.0);
    for (auto& c : jr.c) c = rng.uniform(-1.0, 1.0);
    const auto I2 = interpolate_1d<M>(jl, jr);
    for (int k = 0; k < J; ++k) {
      match.worst = std::max(match.worst, std::abs(scaled_jet(I2, k, -1.0) - jl.c[k]));
      match.worst = std::max(match.worst, std::abs(scaled_jet(I2, k, 1.0) - jr.c[k]));
    }

    // truncate o interpolate on degree-m data is the identity.
    TaylorPoly<N> low(mid, s);
    for (int k = 0; k < J; ++k) low.c[k] = rng.uniform(-1.0, 1.0);
    auto low_at = [&](double at) {
      TaylorPoly<J> r(at, s);
      const double xi = (at - mid) / s;
      for (int k = 0; k < J; ++k) r.c[k] = scaled_jet(low, k, xi);
      return r;
    };
    const auto lj = low_at(xa), rj = low_at(xa + h);
    const auto back = truncate<M>(interpolate_1d<M>(lj, rj));
    for (int k = 0; k < J; ++k) trunc.worst = std::max(trunc.worst, rel(back.c[k], low.c[k]));

    // 2D reproduction and ordering.
    const double ya = rng.uniform(-2.0, 2.0), hy = rng.uniform(0.05, 1.0);
    const double sy = 0.5 * hy, midy = ya + sy;
    const auto T = rng.tensor<N>({mid, midy}, {s, sy});
    auto corner = [&](double x, double y) {
      TensorPoly<N> r({x, y}, {s, sy});
      const double xi = (x - mid) / s, eta = (y - midy) / sy;
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          long double v = 0.0L;
          for (int i = k; i < N; ++i)
            for (int j = l; j < N; ++j) {
              long double bx = 1.0L, by = 1.0L;
              for (int t = 1; t <= k; ++t) bx = bx * (i - k + t) / t;
              for (int t = 1; t <= l; ++t) by = by * (j - l + t) / t;
              v += bx * by * T(i, j) * std::pow(static_cast<long double>(xi), i - k) *
                   std::pow(static_cast<long double>(eta), j - l);
            }
          r(k, l) = static_cast<double>(v);
        }
      return r;
    };
    const auto bl = corner(xa, ya), br = corner(xa + h, ya), tl = corner(xa, ya + hy), tr = corner(xa + h, ya + hy);
    const auto T2 = interpolate_2d<M>(bl, br, tl, tr);
    for (int k = 0; k < N * N; ++k) reprod2.worst = std::max(reprod2.worst, rel(T2.c[k], T.c[k]));

    // x-then-y ordering against the library's y-then-x, on random corner jets.
    std::array<TensorPoly<N>, 4> cj;
    for (int c = 0; c < 4; ++c) {
      cj[static_cast<std::size_t>(c)] = TensorPoly<N>({c % 2 ? xa + h : xa, c / 2 ? ya + hy : ya}, {s, sy});
      for (int k = 0; k < J; ++k)
        for (int l = 0; l < J; ++l) cj[static_cast<std::size_t>(c)](k, l) = rng.uniform(-1.0, 1.0);
    }
    const auto lib = interpolate_2d<M>(cj[0], cj[1], cj[2], cj[3]);
    const auto& K = HermiteKernel<M>::get();
    std::array<double, N * N> alt{};
    std::array<double, 2 * J * N> rows{};  // [edge][l][x-coefficient]
    for (int l = 0; l < J; ++l) {
      double a[J], b[J];
      for (int k = 0; k < J; ++k) {
        a[k] = cj[0](k, l);
        b[k] = cj[1](k, l);
      }
      K.apply(a, b, rows.data() + l * N);
      for (int k = 0; k < J; ++k) {
        a[k] = cj[2](k, l);
        b[k] = cj[3](k, l);
      }
      K.apply(a, b, rows.data() + (J + l) * N);
    }
    for (int i = 0; i < N; ++i) {
      double a[J], b[J], col[N];
      for (int l = 0; l < J; ++l) {
        a[l] = rows[static_cast<std::size_t>(l * N + i)];
        b[l] = rows[static_cast<std::size_t>((J + l) * N + i)];
      }
      K.apply(a, b, col);
      for (int j = 0; j < N; ++j) alt[static_cast<std::size_t>(i * N + j)] = col[j];
    }
    for (int k = 0; k < N * N; ++k) order2.worst = std::max(order2.worst, std::abs(lib.c[k] - alt[k]));
  }
}

}  // namespace detail_props

inline std::vector<PropertyResult> hermite_properties(int instances, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PropertyResult> out = {
      {"1D reproduction of degree-(2m+1) polynomials, m=1..5", 0.0, 1e-10, instances},
      {"1D jet matching at both endpoints, m=1..5", 0.0, 1e-11, instances},
      {"m=3 interpolant matches repeated-node divided differences", 0.0, 1e-11, instances},
      {"truncate o interpolate is the identity on degree-m data", 0.0, 1e-11, instances},
      {"2D reproduction of tensor polynomials, m=1..5", 0.0, 1e-10, instances},
      {"2D y-then-x equals x-then-y ordering", 0.0, 1e-11, instances},
  };
  const int per = std::max(1, instances / 5);
  detail_props::hermite_order<1>(rng, out, per);
  detail_props::hermite_order<2>(rng, out, per);
  detail_props::hermite_order<3>(rng, out, per);
  detail_props::hermite_order<4>(rng, out, per);
  detail_props::hermite_order<5>(rng, out, instances - 4 * per);

  auto& dd = out[2];
  for (int it = 0; it < instances; ++it) {
    constexpr int M = 3, J = M + 1;
    const double a = rng.uniform(-2.0, 2.0), h = rng.uniform(0.05, 1.0), s = 0.5 * h;
    TaylorPoly<J> L(a, s), R(a + h, s);
    std::vector<double> ja(J), jb(J);
    for (int k = 0; k < J; ++k) {
      L.c[k] = rng.uniform(-1.0, 1.0);
      R.c[k] = rng.uniform(-1.0, 1.0);
      ja[static_cast<std::size_t>(k)] = L.c[k] / std::pow(s, k);
      jb[static_cast<std::size_t>(k)] = R.c[k] / std::pow(s, k);
    }
    const auto I = interpolate_1d<M>(L, R);
    for (int k = 0; k < 10; ++k) {
      const double x = a + h * rng.uniform(0.0, 1.0);
      dd.worst = std::max(dd.worst, rel(eval(I, x), newton_hermite(ja, jb, a, a + h, x)));
    }
  }
  return out;
}

}  // namespace hermitefc::testing
