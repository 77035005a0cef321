#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hermitefc/field.hpp"
#include "hermitefc/physics.hpp"
#include "hermitefc/problems.hpp"

using namespace hermitefc;

namespace {
const FluxModel kBurgers{ModelKind::burgers1d, 1.4};
const FluxModel kEuler1{ModelKind::euler1d, 1.4};
const FluxModel kEuler2{ModelKind::euler2d, 1.4};
}  // namespace

TEST(Physics, ModelShape) {
  EXPECT_EQ(kBurgers.nvar(), 1);
  EXPECT_EQ(kEuler1.nvar(), 3);
  EXPECT_EQ(kEuler2.nvar(), 4);
  EXPECT_EQ(kEuler2.dims(), 2);
  EXPECT_FALSE(kBurgers.is_euler());
}

TEST(Physics, SodStatesFromConserved) {
  const auto l = conservative_to_primitive({1.0, 0.0, 2.5, 0.0}, kEuler1);
  EXPECT_DOUBLE_EQ(l.rho, 1.0);
  EXPECT_DOUBLE_EQ(l.u, 0.0);
  EXPECT_NEAR(l.p, 1.0, 1e-15);
  const auto r = conservative_to_primitive({0.125, 0.0, 0.25, 0.0}, kEuler1);
  EXPECT_NEAR(r.p, 0.1, 1e-15);
  EXPECT_NEAR(r.c, std::sqrt(1.12), 1e-15);
  EXPECT_NEAR(r.T, 0.8, 1e-15);
}

TEST(Physics, PositivityErrors) {
  EXPECT_THROW(conservative_to_primitive({-1.0, 0.0, 2.5, 0.0}, kEuler1), PositivityError);
  EXPECT_THROW(conservative_to_primitive({1.0, 3.0, 2.5, 0.0}, kEuler1), PositivityError);
  try {
    conservative_to_primitive({1.0, 0.0, 0.0, -1.0}, kEuler2, 0.25, -0.5);
    FAIL();
  } catch (const PositivityError& e) {
    EXPECT_DOUBLE_EQ(e.x(), 0.25);
    EXPECT_DOUBLE_EQ(e.y(), -0.5);
  }
}

TEST(Physics, RoundTripRandomStates) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> pos(0.05, 5.0), vel(-3.0, 3.0);
  for (int it = 0; it < 1000; ++it) {
    for (const auto& model : {kEuler1, kEuler2}) {
      const auto s = make_primitive(pos(gen), vel(gen), model.dims() == 2 ? vel(gen) : 0.0, pos(gen), 1.4);
      const auto q = primitive_to_conservative(s, model);
      const auto b = conservative_to_primitive(q, model);
      EXPECT_NEAR(b.rho, s.rho, 1e-13 * s.rho);
      EXPECT_NEAR(b.u, s.u, 1e-13 * (1.0 + std::abs(s.u)));
      EXPECT_NEAR(b.v, s.v, 1e-13 * (1.0 + std::abs(s.v)));
      EXPECT_NEAR(b.p, s.p, 1e-13 * (s.p + 0.5 * s.rho * (s.u * s.u + s.v * s.v)));
    }
  }
}

TEST(Physics, EntropyPair) {
  const auto one = entropy_pair(make_primitive(1.0, 0.3, 0.0, 1.0, 1.4), kEuler1);
  EXPECT_DOUBLE_EQ(one.S, 0.0);
  EXPECT_DOUBLE_EQ(one.uS, 0.0);
  // 0.125 / 0.4 * log(0.1 / 0.125^1.4).
  const auto sod = entropy_pair(make_primitive(0.125, 0.0, 0.0, 0.1, 1.4), kEuler1);
  EXPECT_NEAR(sod.S, 0.19019783292428888, 1e-14);
  EXPECT_DOUBLE_EQ(sod.uS, 0.0);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> pos(0.1, 4.0);
  for (int it = 0; it < 100; ++it) {
    const double rho = pos(gen);
    EXPECT_NEAR(entropy_pair(make_primitive(rho, 1.0, 0.0, std::pow(rho, 1.4), 1.4), kEuler1).S, 0.0, 1e-13);
  }
  const auto b = entropy_pair(make_primitive(1.0, 2.0, 0.0, 0.0, 1.4), kBurgers);
  EXPECT_DOUBLE_EQ(b.S, 2.0);
  EXPECT_DOUBLE_EQ(b.uS, 8.0 / 3.0);
}

TEST(Physics, WaveSpeeds) {
  EXPECT_NEAR(wave_speed(make_primitive(1.0, 0.0, 0.0, 1.0, 1.4), kEuler1), std::sqrt(1.4), 1e-15);
  EXPECT_NEAR(wave_speed(make_primitive(1.0, -2.0, 0.0, 1.0, 1.4), kEuler1), 2.0 + std::sqrt(1.4), 1e-15);
  EXPECT_NEAR(wave_speed(make_primitive(1.0, 3.0, 4.0, 1.0, 1.4), kEuler2), 5.0 + std::sqrt(1.4), 1e-15);
  PrimitiveState b;
  b.u = -1.3;
  EXPECT_DOUBLE_EQ(wave_speed(b, kBurgers), 1.3);
}

TEST(Physics, FluxPolyExamples) {
  std::array<TaylorPoly<4>, 1> u{TaylorPoly<4>::constant(2.0)};
  std::array<TaylorPoly<4>, 1> f;
  flux_poly<4>(kBurgers, u, 0.0, f);
  EXPECT_DOUBLE_EQ(f[0].c[0], 2.0);
  for (int k = 1; k < 4; ++k) EXPECT_DOUBLE_EQ(f[0].c[k], 0.0);

  std::array<TaylorPoly<4>, 3> q{TaylorPoly<4>::constant(1.0), TaylorPoly<4>::constant(0.0),
                                 TaylorPoly<4>::constant(2.5)};
  std::array<TaylorPoly<4>, 3> g;
  flux_poly<4>(kEuler1, q, 0.0, g);
  EXPECT_DOUBLE_EQ(g[0].c[0], 0.0);
  EXPECT_NEAR(g[1].c[0], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(g[2].c[0], 0.0);
}

TEST(Physics, FluxPolyMatchesPointwiseComposition) {
  // Smooth state about x0 with scale s: the modal flux agrees with the
  // pointwise flux exactly at the center and to O(s^N) on the cell.
  constexpr int N = 8;
  auto err_for = [](double s) {
    const double x0 = 0.3;
    const auto x = TaylorPoly<N>::variable(x0, s);
    auto rho = hermitefc::exp(0.2 * hermitefc::sin(x));
    auto u = 0.5 * hermitefc::cos(x);
    auto p = TaylorPoly<N>::constant(1.0, x0, s) + 0.3 * hermitefc::sin(2.0 * x);
    const auto mom = mul_trunc(rho, u);
    auto E = p;
    E *= 1.0 / 0.4;
    E.axpy(0.5, mul_trunc(mom, u));
    std::array<TaylorPoly<N>, 3> q{rho, mom, E};
    std::array<TaylorPoly<N>, 3> f;
    flux_poly<N>(kEuler1, q, 0.0, f);
    double center = 0.0, cell = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double xi = -1.0 + 0.1 * k, at = x0 + s * xi;
      const double r = std::exp(0.2 * std::sin(at)), v = 0.5 * std::cos(at), pr = 1.0 + 0.3 * std::sin(2.0 * at);
      const ConservedState qs{r, r * v, pr / 0.4 + 0.5 * r * v * v, 0.0};
      const auto fs = pointwise_flux(qs, kEuler1);
      for (int c = 0; c < 3; ++c) {
        const double d = std::abs(eval(f[c], at) - fs[c]);
        cell = std::max(cell, d);
        if (k == 10) center = std::max(center, d);
      }
    }
    return std::pair{center, cell};
  };
  const auto [c1, e1] = err_for(0.1);
  const auto [c2, e2] = err_for(0.05);
  EXPECT_LE(c1, 1e-14);
  EXPECT_LE(c2, 1e-14);
  EXPECT_LE(e1, 1e-8);
  EXPECT_GT(std::log2(e1 / e2), N - 0.5);
}

TEST(Physics, BurgersFluxShift) {
  // flux(u + a) - flux(u) = a u + a^2/2 as polynomials.
  const TaylorPoly<6> u({0.3, -1.0, 0.5, 0.2, -0.1, 0.05}, 0.0, 0.5);
  const double a = 0.7;
  auto ua = u;
  ua.c[0] += a;
  std::array<TaylorPoly<6>, 1> in0{u}, in1{ua}, f0, f1;
  flux_poly<6>(kBurgers, in0, 0.0, f0);
  flux_poly<6>(kBurgers, in1, 0.0, f1);
  for (int k = 0; k < 6; ++k) {
    const double expect = a * u.c[k] + (k == 0 ? 0.5 * a * a : 0.0);
    EXPECT_NEAR(f1[0].c[k] - f0[0].c[k], expect, 1e-15);
  }
}

TEST(Physics, ViscousFluxAddsGradient) {
  const TaylorPoly<4> u({0.0, 1.0, 0.0, 0.0}, 0.0, 0.5);
  std::array<TaylorPoly<4>, 1> in{u}, f;
  flux_poly<4>(kBurgers, in, 0.1, f);
  EXPECT_NEAR(f[0].c[0], -0.1 * 2.0, 1e-15);
}

TEST(Physics, TensorFluxMatchesPointwise) {
  constexpr int N = 6;
  const std::array<double, 2> c{0.1, -0.2}, s{0.05, 0.05};
  auto q = std::array<TensorPoly<N>, 4>{};
  const auto px = TaylorPoly<N>::variable(c[0], s[0]);
  const auto py = TaylorPoly<N>::variable(c[1], s[1]);
  const auto one_y = TaylorPoly<N>::constant(1.0, c[1], s[1]);
  const auto one_x = TaylorPoly<N>::constant(1.0, c[0], s[0]);
  q[0] = outer<N, N>(TaylorPoly<N>::constant(1.0, c[0], s[0]) + 0.1 * px, one_y);
  q[1] = outer<N, N>(one_x, 0.5 * py);
  q[2] = outer<N, N>(0.3 * px, one_y);
  q[3] = outer<N, N>(one_x, TaylorPoly<N>::constant(3.0, c[1], s[1]));
  std::array<TensorPoly<N>, 4> f, g;
  flux_poly<N>(kEuler2, q, 0.0, f, g);
  const ConservedState qs{eval2(q[0], c[0], c[1]), eval2(q[1], c[0], c[1]), eval2(q[2], c[0], c[1]),
                          eval2(q[3], c[0], c[1])};
  const auto fs = pointwise_flux(qs, kEuler2, 0), gs = pointwise_flux(qs, kEuler2, 1);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(eval2(f[k], c[0], c[1]), fs[k], 1e-14);
    EXPECT_NEAR(eval2(g[k], c[0], c[1]), gs[k], 1e-14);
  }
}

TEST(Physics, MaxWaveSpeedOfSodField) {
  const auto spec = make_problem("sod");
  const auto f = initial_field<8, 3>(spec, Parity::primal);
  EXPECT_NEAR(max_wave_speed(f, spec.model), std::sqrt(1.4), 1e-15);
  ProblemSpec uni = spec;
  uni.initial = InitialKind::uniform;
  uni.left = {1.0, 0.0, 0.0, 1.0};
  EXPECT_NEAR(max_wave_speed(initial_field<8, 3>(uni, Parity::primal), uni.model), std::sqrt(1.4), 1e-15);
  const auto b = make_problem("burgers-smooth");
  EXPECT_NEAR(max_wave_speed(initial_field<8, 1>(b, Parity::primal), b.model), 1.3, 1e-3);
}
