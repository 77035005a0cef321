#pragma once
// Independent reference computations for the exact Riemann solver.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "hermitefc/problems.hpp"

namespace hermitefc::testing {

/// Star-region pressure and velocity by bisection on the two-wave pressure function.
struct StarState {
  double p = 0.0, u = 0.0;
};

inline double wave_curve(double p, double rho, double pk, double g) {
  const double c = std::sqrt(g * pk / rho);
  if (p > pk) {
    const double a = 2.0 / ((g + 1.0) * rho), b = (g - 1.0) / (g + 1.0) * pk;
    return (p - pk) * std::sqrt(a / (p + b));
  }
  return 2.0 * c / (g - 1.0) * (std::pow(p / pk, (g - 1.0) / (2.0 * g)) - 1.0);
}

inline StarState bisect_star(const std::array<double, 3>& l, const std::array<double, 3>& r, double g) {
  auto f = [&](double p) { return wave_curve(p, l[0], l[2], g) + wave_curve(p, r[0], r[2], g) + r[1] - l[1]; };
  double lo = 1e-14, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  StarState s;
  s.p = 0.5 * (lo + hi);
  s.u = 0.5 * (l[1] + r[1]) + 0.5 * (wave_curve(s.p, r[0], r[2], g) - wave_curve(s.p, l[0], l[2], g));
  return s;
}

/// Largest relative jump-condition residual of the solution's waves: the
/// Rankine-Hugoniot relations across shocks, the isentrope and Riemann
/// invariant across rarefactions.
inline double wave_residual(const RiemannSolution& s) {
  const double g = s.gamma;
  auto cons = [&](double rho, double u, double p) {
    return std::array<double, 3>{rho, rho * u, p / (g - 1.0) + 0.5 * rho * u * u};
  };
  auto flux = [&](double rho, double u, double p) {
    const double E = p / (g - 1.0) + 0.5 * rho * u * u;
    return std::array<double, 3>{rho * u, rho * u * u + p, u * (E + p)};
  };
  double worst = 0.0;
  auto side = [&](const PrimitiveState& w, double rho_star, WaveKind kind, double speed, double sign) {
    if (kind == WaveKind::shock) {
      const auto ua = cons(w.rho, w.u, w.p), ub = cons(rho_star, s.u_star, s.p_star);
      const auto fa = flux(w.rho, w.u, w.p), fb = flux(rho_star, s.u_star, s.p_star);
      for (int k = 0; k < 3; ++k) {
        const double scale = std::max({1.0, std::abs(fa[k]), std::abs(fb[k]), std::abs(speed * ua[k])});
        worst = std::max(worst, std::abs((fb[k] - fa[k]) - speed * (ub[k] - ua[k])) / scale);
      }
    } else {
      const double ent = std::max(1.0, w.p / std::pow(w.rho, g));
      worst = std::max(worst, std::abs(s.p_star / std::pow(rho_star, g) - w.p / std::pow(w.rho, g)) / ent);
      const double cs = std::sqrt(g * s.p_star / rho_star), cw = std::sqrt(g * w.p / w.rho);
      const double inv_w = w.u + sign * 2.0 * cw / (g - 1.0), inv_s = s.u_star + sign * 2.0 * cs / (g - 1.0);
      worst = std::max(worst, std::abs(inv_w - inv_s) / std::max(1.0, std::abs(inv_w)));
    }
  };
  side(s.left, s.rho_star_left, s.left_wave, s.left_speed, 1.0);
  side(s.right, s.rho_star_right, s.right_wave, s.right_speed, -1.0);
  return worst;
}

/// Random (rho, u, p) pair without vacuum generation.
inline std::array<std::array<double, 3>, 2> random_riemann_pair(std::mt19937_64& gen, double g) {
  std::uniform_real_distribution<double> pos(0.1, 10.0), vel(-2.0, 2.0);
  for (;;) {
    const std::array<double, 3> l{pos(gen), vel(gen), pos(gen)}, r{pos(gen), vel(gen), pos(gen)};
    const double cl = std::sqrt(g * l[2] / l[0]), cr = std::sqrt(g * r[2] / r[0]);
    if (2.0 * (cl + cr) / (g - 1.0) > r[1] - l[1] + 0.5) return {l, r};
  }
}

}  // namespace hermitefc::testing
