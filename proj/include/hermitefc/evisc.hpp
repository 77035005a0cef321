#pragma once
// Entropy-viscosity sensor on nodal point values.
//
//   nu     = min(nu_EV, nu_max)
//   nu_EV  = alpha_EV h^beta rho_j |r_j| (|du_j|)
//   nu_max = alpha_max h rho_j max_D(speed + c)
//
// r is the entropy residual dS/dt + div(F_S), BDF2 in time (spacing one full
// step on a fixed grid parity) and centered differences in space.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "hermitefc/errors.hpp"
#include "hermitefc/hermite.hpp"

namespace hermitefc {

struct EVParams {
  double alpha_ev = 0.0;
  double alpha_max = 0.0;
  /// Exponent of h in nu_EV. Acceptance runs use 1; 2 is a diagnostics switch.
  int beta = 1;
  bool use_delta_u = false;

  bool enabled() const { return alpha_max > 0.0; }
};

enum class ViscosityBranch : unsigned char { ev, max };

struct ViscosityField {
  std::vector<double> nu;
  std::vector<double> r;
  std::vector<ViscosityBranch> selected;
};

/// Entropy values at the two previous full steps of one grid parity.
class EntropyHistory {
 public:
  int valid_steps() const { return valid_; }
  double dt() const { return dt_; }
  const std::vector<double>& previous() const { return prev1_; }
  const std::vector<double>& before_previous() const { return prev2_; }

  void push(std::span<const double> s, double dt) {
    if (valid_ > 0 && dt != dt_) throw ContractError("EntropyHistory: step size changed");
    prev2_ = std::move(prev1_);
    prev1_.assign(s.begin(), s.end());
    dt_ = dt;
    ++valid_;
  }
  void reset() {
    prev1_.clear();
    prev2_.clear();
    valid_ = 0;
  }

 private:
  std::vector<double> prev1_;
  std::vector<double> prev2_;
  double dt_ = 0.0;
  int valid_ = 0;
};

namespace detail {

// d/dx along a line of n samples with stride; centered inside, wrapped if
// periodic, second-order one-sided at the ends otherwise.
inline double line_derivative(std::span<const double> f, int idx, int n, int stride, int pos,
                              bool periodic, double h) {
  if (periodic) {
    const int lo = pos == 0 ? idx + (n - 1) * stride : idx - stride;
    const int hi = pos == n - 1 ? idx - (n - 1) * stride : idx + stride;
    return (f[static_cast<std::size_t>(hi)] - f[static_cast<std::size_t>(lo)]) / (2.0 * h);
  }
  auto at = [&](int k) { return f[static_cast<std::size_t>(idx + k * stride)]; };
  if (pos == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (pos == n - 1) return (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
  return (at(1) - at(-1)) / (2.0 * h);
}

// Undivided |f_{j+1} - f_{j-1}| / 2, one-sided |f_1 - f_0| at open ends.
inline double line_jump(std::span<const double> f, int idx, int n, int stride, int pos, bool periodic) {
  if (periodic) {
    const int lo = pos == 0 ? idx + (n - 1) * stride : idx - stride;
    const int hi = pos == n - 1 ? idx - (n - 1) * stride : idx + stride;
    return 0.5 * std::abs(f[static_cast<std::size_t>(hi)] - f[static_cast<std::size_t>(lo)]);
  }
  auto at = [&](int k) { return f[static_cast<std::size_t>(idx + k * stride)]; };
  if (pos == 0) return std::abs(at(1) - at(0));
  if (pos == n - 1) return std::abs(at(0) - at(-1));
  return 0.5 * std::abs(at(1) - at(-1));
}

}  // namespace detail

inline std::vector<double> entropy_residual(std::span<const double> s_now, const EntropyHistory& hist,
                                            std::span<const double> us, const Grid1D& grid, double dt) {
  if (hist.valid_steps() < 2) throw ContractError("entropy_residual: needs two history levels");
  if (hist.dt() != dt) throw ContractError("entropy_residual: history spacing differs from dt");
  const int n = grid.nodes();
  const auto& s1 = hist.previous();
  const auto& s2 = hist.before_previous();
  std::vector<double> r(static_cast<std::size_t>(n));
  const double h = grid.h();
  for (int j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const double dsdt = (3.0 * (s_now[k] - s1[k]) - (s1[k] - s2[k])) / (2.0 * dt);
    r[k] = dsdt + detail::line_derivative(us, j, n, 1, j, grid.periodic, h);
  }
  return r;
}

inline std::vector<double> entropy_residual(std::span<const double> s_now, const EntropyHistory& hist,
                                            std::span<const double> us, std::span<const double> vs,
                                            const Grid2D& grid, double dt) {
  if (hist.valid_steps() < 2) throw ContractError("entropy_residual: needs two history levels");
  if (hist.dt() != dt) throw ContractError("entropy_residual: history spacing differs from dt");
  const int nx = grid.nx(), ny = grid.ny();
  const auto& s1 = hist.previous();
  const auto& s2 = hist.before_previous();
  std::vector<double> r(static_cast<std::size_t>(nx * ny));
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const int idx = grid.index(i, j);
      const auto k = static_cast<std::size_t>(idx);
      const double dsdt = (3.0 * (s_now[k] - s1[k]) - (s1[k] - s2[k])) / (2.0 * dt);
      r[k] = dsdt + detail::line_derivative(us, idx, nx, ny, i, grid.periodic(), grid.hx()) +
             detail::line_derivative(vs, idx, ny, 1, j, grid.periodic(), grid.hy());
    }
  return r;
}

inline std::vector<double> delta_u(std::span<const double> u, const Grid1D& grid) {
  const int n = grid.nodes();
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(j)] = detail::line_jump(u, j, n, 1, j, grid.periodic);
  return d;
}

/// max of the undivided x-jump of u and y-jump of v.
inline std::vector<double> delta_u(std::span<const double> u, std::span<const double> v, const Grid2D& grid) {
  const int nx = grid.nx(), ny = grid.ny();
  std::vector<double> d(static_cast<std::size_t>(nx * ny));
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const int idx = grid.index(i, j);
      d[static_cast<std::size_t>(idx)] =
          std::max(detail::line_jump(u, idx, nx, ny, i, grid.periodic()),
                   detail::line_jump(v, idx, ny, 1, j, grid.periodic()));
    }
  return d;
}

/// nu_max everywhere; used until two history levels exist.
inline ViscosityField startup_viscosity(std::span<const double> rho, const EVParams& params, double h,
                                        double max_speed) {
  ViscosityField f;
  const auto n = rho.size();
  f.nu.resize(n);
  f.r.assign(n, 0.0);
  f.selected.assign(n, ViscosityBranch::max);
  for (std::size_t j = 0; j < n; ++j) f.nu[j] = params.alpha_max * h * rho[j] * max_speed;
  return f;
}

/// `du` may be empty unless params.use_delta_u.
inline ViscosityField viscosity(std::span<const double> r, std::span<const double> rho, const EVParams& params,
                                double h, double max_speed, std::span<const double> du = {}) {
  if (params.use_delta_u && du.size() != r.size())
    throw ContractError("viscosity: delta-u sensor requested without values");
  ViscosityField f;
  const auto n = r.size();
  f.nu.resize(n);
  f.r.assign(r.begin(), r.end());
  f.selected.resize(n);
  const double hb = params.beta == 2 ? h * h : h;
  for (std::size_t j = 0; j < n; ++j) {
    const double nu_max = params.alpha_max * h * rho[j] * max_speed;
    double nu_ev = params.alpha_ev * hb * rho[j] * std::abs(r[j]);
    if (params.use_delta_u) nu_ev *= du[j];
    if (nu_ev < nu_max) {
      f.nu[j] = nu_ev;
      f.selected[j] = ViscosityBranch::ev;
    } else {
      f.nu[j] = nu_max;
      f.selected[j] = ViscosityBranch::max;
    }
  }
  return f;
}

}  // namespace hermitefc
