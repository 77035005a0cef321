#pragma once
// Flux models: inviscid Burgers, 1D and 2D Euler with an ideal gas law, each
// optionally regularized by the artificial viscous flux -nu * q_x (-nu * q_y).

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "hermitefc/errors.hpp"
#include "hermitefc/polyalg.hpp"

namespace hermitefc {

enum class ModelKind { burgers1d, euler1d, euler2d };

struct FluxModel {
  ModelKind kind = ModelKind::burgers1d;
  double gamma = 1.4;

  int nvar() const {
    switch (kind) {
      case ModelKind::burgers1d: return 1;
      case ModelKind::euler1d: return 3;
      case ModelKind::euler2d: return 4;
    }
    return 0;
  }
  int dims() const { return kind == ModelKind::euler2d ? 2 : 1; }
  bool is_euler() const { return kind != ModelKind::burgers1d; }
};

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::burgers1d: return "burgers1d";
    case ModelKind::euler1d: return "euler1d";
    case ModelKind::euler2d: return "euler2d";
  }
  return "?";
}

/// Pointwise conserved variables: (u) | (rho, rho u, E) | (rho, rho u, rho v, E).
using ConservedState = std::array<double, 4>;

/// For Burgers only `u` is meaningful and rho = 1.
struct PrimitiveState {
  double rho = 1.0;
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;
  double T = 0.0;
  double c = 0.0;
};

inline PrimitiveState make_primitive(double rho, double u, double v, double p, double gamma) {
  PrimitiveState s;
  s.rho = rho;
  s.u = u;
  s.v = v;
  s.p = p;
  s.T = p / rho;
  s.c = std::sqrt(gamma * p / rho);
  return s;
}

inline PrimitiveState conservative_to_primitive(const ConservedState& q, const FluxModel& model,
                                                double x = 0.0, double y = 0.0) {
  if (model.kind == ModelKind::burgers1d) {
    PrimitiveState s;
    s.u = q[0];
    return s;
  }
  const double rho = q[0];
  if (!(rho > 0.0)) throw PositivityError("nonpositive density " + std::to_string(rho), x, y);
  const double u = q[1] / rho;
  double v = 0.0, kinetic = 0.5 * q[1] * u, E = q[2];
  if (model.kind == ModelKind::euler2d) {
    v = q[2] / rho;
    kinetic += 0.5 * q[2] * v;
    E = q[3];
  }
  const double p = (model.gamma - 1.0) * (E - kinetic);
  if (!(p > 0.0)) throw PositivityError("nonpositive pressure " + std::to_string(p), x, y);
  return make_primitive(rho, u, v, p, model.gamma);
}

inline ConservedState primitive_to_conservative(const PrimitiveState& s, const FluxModel& model) {
  ConservedState q{};
  switch (model.kind) {
    case ModelKind::burgers1d:
      q[0] = s.u;
      break;
    case ModelKind::euler1d:
      q = {s.rho, s.rho * s.u, s.p / (model.gamma - 1.0) + 0.5 * s.rho * s.u * s.u, 0.0};
      break;
    case ModelKind::euler2d:
      q = {s.rho, s.rho * s.u, s.rho * s.v,
           s.p / (model.gamma - 1.0) + 0.5 * s.rho * (s.u * s.u + s.v * s.v)};
      break;
  }
  return q;
}

/// |u| + c in 1D, |(u, v)| + c in 2D, |u| for Burgers.
inline double wave_speed(const PrimitiveState& s, const FluxModel& model) {
  switch (model.kind) {
    case ModelKind::burgers1d: return std::abs(s.u);
    case ModelKind::euler1d: return std::abs(s.u) + s.c;
    case ModelKind::euler2d: return std::hypot(s.u, s.v) + s.c;
  }
  return 0.0;
}

struct EntropyPair {
  double S = 0.0;
  double uS = 0.0;
  double vS = 0.0;
};

/// Euler: S = rho/(gamma-1) log(p / rho^gamma) with fluxes uS, vS.
/// Burgers: S = u^2/2 with flux u^3/3.
inline EntropyPair entropy_pair(const PrimitiveState& s, const FluxModel& model) {
  EntropyPair e;
  if (model.kind == ModelKind::burgers1d) {
    e.S = 0.5 * s.u * s.u;
    e.uS = s.u * s.u * s.u / 3.0;
    return e;
  }
  if (!(s.rho > 0.0 && s.p > 0.0)) throw PositivityError("entropy of a nonpositive state", 0.0);
  const double g = model.gamma;
  e.S = s.rho / (g - 1.0) * std::log(s.p / std::pow(s.rho, g));
  e.uS = s.u * e.S;
  e.vS = s.v * e.S;
  return e;
}

// ---------------------------------------------------------------------------
// Modal flux polynomials. Nonlinear products and quotients are truncated to
// the operand length (degree 2m+1 for solution polynomials).

/// 1D flux polynomials f(q) - nu q_x for nvar() polynomials in `q`.
template <int N>
void flux_poly(const FluxModel& model, std::span<const TaylorPoly<N>> q, double nu,
               std::span<TaylorPoly<N>> f) {
  switch (model.kind) {
    case ModelKind::burgers1d: {
      f[0] = mul_trunc(q[0], q[0]);
      f[0] *= 0.5;
      break;
    }
    case ModelKind::euler1d: {
      if (q.size() < 3 || f.size() < 3) throw ContractError("flux_poly: Euler needs three variables");
      const auto& rho = q[0];
      const auto& mom = q[1];
      const auto& E = q[2];
      const auto u = div_trunc(mom, rho);
      auto rhouu = mul_trunc(mom, u);
      auto p = E;
      p.axpy(-0.5, rhouu);
      p *= (model.gamma - 1.0);
      f[0] = mom;
      f[1] = rhouu + p;
      f[2] = mul_trunc(E + p, u);
      break;
    }
    case ModelKind::euler2d:
      throw ContractError("flux_poly: 2D model needs tensor polynomials");
  }
  if (nu != 0.0)
    for (int k = 0; k < model.nvar(); ++k) f[k].axpy(-nu, derivative_padded(q[k]));
}

/// 2D Euler x-fluxes `f` and y-fluxes `g` with viscous terms -nu q_x, -nu q_y.
template <int N>
void flux_poly(const FluxModel& model, std::span<const TensorPoly<N>> q, double nu,
               std::span<TensorPoly<N>> f, std::span<TensorPoly<N>> g) {
  if (model.kind != ModelKind::euler2d) throw ContractError("flux_poly: tensor input needs the 2D model");
  const auto& rho = q[0];
  const auto& mu = q[1];
  const auto& mv = q[2];
  const auto& E = q[3];
  auto one = rho;
  one.c.fill(0.0);
  one.c[0] = 1.0;
  const auto inv_rho = div_trunc(one, rho);
  const auto u = mul_trunc(mu, inv_rho);
  const auto v = mul_trunc(mv, inv_rho);
  const auto rhouu = mul_trunc(mu, u);
  const auto rhouv = mul_trunc(mu, v);
  const auto rhovv = mul_trunc(mv, v);
  auto p = E;
  p.axpy(-0.5, rhouu);
  p.axpy(-0.5, rhovv);
  p *= (model.gamma - 1.0);
  const auto H = E + p;
  f[0] = mu;
  f[1] = rhouu + p;
  f[2] = rhouv;
  f[3] = mul_trunc(H, u);
  g[0] = mv;
  g[1] = rhouv;
  g[2] = rhovv + p;
  g[3] = mul_trunc(H, v);
  if (nu != 0.0)
    for (int k = 0; k < 4; ++k) {
      f[k].axpy(-nu, dx_padded(q[k]));
      g[k].axpy(-nu, dy_padded(q[k]));
    }
}

/// Pointwise inviscid flux (x-direction), used as an oracle for the modal path.
inline ConservedState pointwise_flux(const ConservedState& q, const FluxModel& model, int axis = 0) {
  ConservedState f{};
  switch (model.kind) {
    case ModelKind::burgers1d:
      f[0] = 0.5 * q[0] * q[0];
      break;
    case ModelKind::euler1d: {
      const double u = q[1] / q[0];
      const double p = (model.gamma - 1.0) * (q[2] - 0.5 * q[1] * u);
      f = {q[1], q[1] * u + p, (q[2] + p) * u, 0.0};
      break;
    }
    case ModelKind::euler2d: {
      const double u = q[1] / q[0], v = q[2] / q[0];
      const double p = (model.gamma - 1.0) * (q[3] - 0.5 * (q[1] * u + q[2] * v));
      if (axis == 0)
        f = {q[1], q[1] * u + p, q[2] * u, (q[3] + p) * u};
      else
        f = {q[2], q[1] * v, q[2] * v + p, (q[3] + p) * v};
      break;
    }
  }
  return f;
}

}  // namespace hermitefc
