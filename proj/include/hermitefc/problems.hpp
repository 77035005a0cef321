#pragma once
// Named test problems, their initial data as exact Taylor jets, the exact
// Riemann solver for the 1D Euler equations, and the jet forcing/sponge.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hermitefc/errors.hpp"
#include "hermitefc/evisc.hpp"
#include "hermitefc/field.hpp"
#include "hermitefc/physics.hpp"
#include "hermitefc/polyalg.hpp"

namespace hermitefc {

// ---------------------------------------------------------------------------
// Exact Riemann solver (ideal gas), following the two-wave pressure function.

enum class WaveKind { shock, rarefaction };

struct RiemannSolution {
  PrimitiveState left;
  PrimitiveState right;
  double gamma = 1.4;
  double p_star = 0.0;
  double u_star = 0.0;
  double rho_star_left = 0.0;
  double rho_star_right = 0.0;
  WaveKind left_wave = WaveKind::rarefaction;
  WaveKind right_wave = WaveKind::rarefaction;
  /// Shock speed, or head/tail speeds of a rarefaction fan.
  double left_speed = 0.0, left_tail = 0.0;
  double right_speed = 0.0, right_tail = 0.0;
  int iterations = 0;

  /// State at similarity coordinate xi = (x - x0) / t.
  PrimitiveState sample(double xi) const;
};

namespace detail {

inline void pressure_function(double p, const PrimitiveState& s, double g, double& f, double& df) {
  if (p > s.p) {
    const double a = 2.0 / ((g + 1.0) * s.rho);
    const double b = (g - 1.0) / (g + 1.0) * s.p;
    const double q = std::sqrt(a / (p + b));
    f = (p - s.p) * q;
    df = q * (1.0 - 0.5 * (p - s.p) / (b + p));
  } else {
    const double pr = p / s.p;
    f = 2.0 * s.c / (g - 1.0) * (std::pow(pr, (g - 1.0) / (2.0 * g)) - 1.0);
    df = 1.0 / (s.rho * s.c) * std::pow(pr, -(g + 1.0) / (2.0 * g));
  }
}

}  // namespace detail

inline RiemannSolution solve_riemann(const PrimitiveState& left_in, const PrimitiveState& right_in, double gamma) {
  if (!(left_in.rho > 0.0 && left_in.p > 0.0 && right_in.rho > 0.0 && right_in.p > 0.0))
    throw ContractError("solve_riemann: states must have positive density and pressure");
  const double g = gamma;
  RiemannSolution sol;
  sol.gamma = g;
  sol.left = make_primitive(left_in.rho, left_in.u, 0.0, left_in.p, g);
  sol.right = make_primitive(right_in.rho, right_in.u, 0.0, right_in.p, g);
  const auto& L = sol.left;
  const auto& R = sol.right;
  const double du = R.u - L.u;
  if (2.0 / (g - 1.0) * (L.c + R.c) <= du) throw VacuumError("solve_riemann: data generates vacuum");

  auto f_total = [&](double p, double& f, double& df) {
    double fl, dfl, fr, dfr;
    detail::pressure_function(p, L, g, fl, dfl);
    detail::pressure_function(p, R, g, fr, dfr);
    f = fl + fr + du;
    df = dfl + dfr;
  };

  // f is increasing in p; bracket the root, then Newton with bisection fallback.
  double lo = 0.0, hi = std::max(L.p, R.p);
  double f, df;
  f_total(hi, f, df);
  while (f < 0.0) {
    lo = hi;
    hi *= 2.0;
    f_total(hi, f, df);
  }
  const double pvrs = 0.5 * (L.p + R.p) - 0.125 * du * (L.rho + R.rho) * (L.c + R.c);
  double p = std::clamp(pvrs, 1e-6 * hi, hi);
  if (!(p > lo)) p = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    sol.iterations = it + 1;
    f_total(p, f, df);
    if (f < 0.0)
      lo = p;
    else
      hi = p;
    double next = p - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double change = std::abs(next - p) / (0.5 * (next + p));
    p = next;
    if (change < 1e-15 || hi - lo <= 1e-15 * hi) break;
  }
  sol.p_star = p;
  double fl, fr, tmp;
  detail::pressure_function(p, L, g, fl, tmp);
  detail::pressure_function(p, R, g, fr, tmp);
  sol.u_star = 0.5 * (L.u + R.u) + 0.5 * (fr - fl);

  const double gm = (g - 1.0) / (g + 1.0);
  if (p > L.p) {
    sol.left_wave = WaveKind::shock;
    const double pr = p / L.p;
    sol.rho_star_left = L.rho * (pr + gm) / (gm * pr + 1.0);
    sol.left_speed = L.u - L.c * std::sqrt((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g));
    sol.left_tail = sol.left_speed;
  } else {
    sol.left_wave = WaveKind::rarefaction;
    sol.rho_star_left = L.rho * std::pow(p / L.p, 1.0 / g);
    const double c_star = L.c * std::pow(p / L.p, (g - 1.0) / (2.0 * g));
    sol.left_speed = L.u - L.c;
    sol.left_tail = sol.u_star - c_star;
  }
  if (p > R.p) {
    sol.right_wave = WaveKind::shock;
    const double pr = p / R.p;
    sol.rho_star_right = R.rho * (pr + gm) / (gm * pr + 1.0);
    sol.right_speed = R.u + R.c * std::sqrt((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g));
    sol.right_tail = sol.right_speed;
  } else {
    sol.right_wave = WaveKind::rarefaction;
    sol.rho_star_right = R.rho * std::pow(p / R.p, 1.0 / g);
    const double c_star = R.c * std::pow(p / R.p, (g - 1.0) / (2.0 * g));
    sol.right_speed = R.u + R.c;
    sol.right_tail = sol.u_star + c_star;
  }
  return sol;
}

inline PrimitiveState RiemannSolution::sample(double xi) const {
  const double g = gamma;
  if (xi <= u_star) {
    if (left_wave == WaveKind::shock) {
      if (xi <= left_speed) return left;
      return make_primitive(rho_star_left, u_star, 0.0, p_star, g);
    }
    if (xi <= left_speed) return left;
    if (xi >= left_tail) return make_primitive(rho_star_left, u_star, 0.0, p_star, g);
    const double k = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * left.c) * (left.u - xi);
    const double rho = left.rho * std::pow(k, 2.0 / (g - 1.0));
    const double u = 2.0 / (g + 1.0) * (left.c + 0.5 * (g - 1.0) * left.u + xi);
    const double p = left.p * std::pow(k, 2.0 * g / (g - 1.0));
    return make_primitive(rho, u, 0.0, p, g);
  }
  if (right_wave == WaveKind::shock) {
    if (xi >= right_speed) return right;
    return make_primitive(rho_star_right, u_star, 0.0, p_star, g);
  }
  if (xi >= right_speed) return right;
  if (xi <= right_tail) return make_primitive(rho_star_right, u_star, 0.0, p_star, g);
  const double k = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * right.c) * (right.u - xi);
  const double rho = right.rho * std::pow(k, 2.0 / (g - 1.0));
  const double u = 2.0 / (g + 1.0) * (-right.c + 0.5 * (g - 1.0) * right.u + xi);
  const double p = right.p * std::pow(k, 2.0 * g / (g - 1.0));
  return make_primitive(rho, u, 0.0, p, g);
}

inline PrimitiveState exact_riemann(const PrimitiveState& left, const PrimitiveState& right, double gamma,
                                    double xi) {
  return solve_riemann(left, right, gamma).sample(xi);
}

// ---------------------------------------------------------------------------
// Problem definitions.

enum class BoundaryKind { periodic, fixed };

enum class InitialKind {
  sine,            // u = amplitude sin(wavenumber x) + offset (Burgers)
  riemann,         // left/right primitive states split at `split`
  shu_osher,       // left state for x <= split, (1 + amplitude sin(wavenumber x), 0, 1) beyond
  radial_riemann,  // left state for r <= split, right state outside
  vortex_shock,    // left state for x <= split, isentropic vortex beyond
  vortex,          // isentropic vortex everywhere
  uniform          // left state everywhere
};

struct JetForcing {
  double amplitude = 0.0;
  /// Patch [x0, x1] x [y0, y1] carrying a smooth compact bump of height 1.
  std::array<double, 4> patch{0.0, 1.0, 0.0, 1.0};
  double sponge_width = 0.0;
  double sponge_strength = 0.0;
};

struct ProblemSpec {
  std::string name;
  FluxModel model;
  double xl = 0.0, xr = 1.0, yb = 0.0, yt = 1.0;
  int nx = 100, ny = 1;
  int m = 3;
  double cfl = 0.1;
  double t_final = 0.0;
  BoundaryKind bc = BoundaryKind::fixed;
  EVParams ev;
  bool viscous_dt_guard = true;
  int max_steps = 1000000;

  InitialKind initial = InitialKind::uniform;
  /// Primitive states (rho, u, v, p); Burgers stores u in slot 1.
  std::array<double, 4> left{1.0, 0.0, 0.0, 1.0};
  std::array<double, 4> right{1.0, 0.0, 0.0, 1.0};
  double split = 0.0;
  double amplitude = 0.0;
  double wavenumber = 1.0;
  double offset = 0.0;
  double vortex_beta = 6.0;
  double vortex_speed = 2.0;
  JetForcing forcing;

  int dims() const { return model.dims(); }
  double hx() const { return (xr - xl) / nx; }
  double hy() const { return (yt - yb) / ny; }
  bool periodic() const { return bc == BoundaryKind::periodic; }
};

inline PrimitiveState left_state(const ProblemSpec& s) {
  return make_primitive(s.left[0], s.left[1], s.left[2], s.left[3], s.model.gamma);
}
inline PrimitiveState right_state(const ProblemSpec& s) {
  return make_primitive(s.right[0], s.right[1], s.right[2], s.right[3], s.model.gamma);
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  }
  while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
  if (pos != v.size()) throw ConfigError("key '" + key + "': trailing characters in '" + v + "'");
  if (!std::isfinite(d)) throw ConfigError("key '" + key + "': not finite");
  return d;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 2e9) throw ConfigError("key '" + key + "': not an integer");
  return static_cast<int>(d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("key '" + key + "': empty list entry");
    out.push_back(parse_double(key, item.substr(b, e - b + 1)));
  }
  return out;
}

inline std::string fmt_list(std::span<const double> v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ",";
    s += fmt_double(v[k]);
  }
  return s;
}

inline const char* initial_name(InitialKind k) {
  switch (k) {
    case InitialKind::sine: return "sine";
    case InitialKind::riemann: return "riemann";
    case InitialKind::shu_osher: return "shu-osher";
    case InitialKind::radial_riemann: return "radial-riemann";
    case InitialKind::vortex_shock: return "vortex-shock";
    case InitialKind::vortex: return "vortex";
    case InitialKind::uniform: return "uniform";
  }
  return "?";
}

inline std::array<double, 4> parse_state(const std::string& key, const std::string& v) {
  const auto l = parse_list(key, v);
  if (l.size() != 3 && l.size() != 4) throw ConfigError("key '" + key + "': expected rho,u,p or rho,u,v,p");
  if (l.size() == 3) return {l[0], l[1], 0.0, l[2]};
  return {l[0], l[1], l[2], l[3]};
}

}  // namespace detail

/// Ordered (key, value) pairs describing every field of a spec; the inverse of set_field.
inline std::vector<std::pair<std::string, std::string>> problem_fields(const ProblemSpec& s) {
  using detail::fmt_double;
  std::vector<std::pair<std::string, std::string>> f;
  auto state = [&](const std::array<double, 4>& st) {
    if (s.model.kind == ModelKind::euler2d) return detail::fmt_list(std::span<const double>(st));
    const std::array<double, 3> t{st[0], st[1], st[3]};
    return detail::fmt_list(std::span<const double>(t));
  };
  f.emplace_back("name", s.name);
  f.emplace_back("model", to_string(s.model.kind));
  f.emplace_back("gamma", fmt_double(s.model.gamma));
  f.emplace_back("xl", fmt_double(s.xl));
  f.emplace_back("xr", fmt_double(s.xr));
  f.emplace_back("yb", fmt_double(s.yb));
  f.emplace_back("yt", fmt_double(s.yt));
  f.emplace_back("nx", std::to_string(s.nx));
  f.emplace_back("ny", std::to_string(s.ny));
  f.emplace_back("t_final", fmt_double(s.t_final));
  f.emplace_back("bc", s.bc == BoundaryKind::periodic ? "periodic" : "fixed");
  f.emplace_back("initial", detail::initial_name(s.initial));
  f.emplace_back("left", state(s.left));
  f.emplace_back("right", state(s.right));
  f.emplace_back("split", fmt_double(s.split));
  f.emplace_back("amplitude", fmt_double(s.amplitude));
  f.emplace_back("wavenumber", fmt_double(s.wavenumber));
  f.emplace_back("offset", fmt_double(s.offset));
  f.emplace_back("vortex_beta", fmt_double(s.vortex_beta));
  f.emplace_back("vortex_speed", fmt_double(s.vortex_speed));
  f.emplace_back("forcing_amplitude", fmt_double(s.forcing.amplitude));
  f.emplace_back("forcing_patch", detail::fmt_list(std::span<const double>(s.forcing.patch)));
  f.emplace_back("sponge_width", fmt_double(s.forcing.sponge_width));
  f.emplace_back("sponge_strength", fmt_double(s.forcing.sponge_strength));
  f.emplace_back("m", std::to_string(s.m));
  f.emplace_back("cfl", fmt_double(s.cfl));
  f.emplace_back("max_steps", std::to_string(s.max_steps));
  f.emplace_back("viscous_dt_guard", s.viscous_dt_guard ? "true" : "false");
  f.emplace_back("alpha_ev", fmt_double(s.ev.alpha_ev));
  f.emplace_back("alpha_max", fmt_double(s.ev.alpha_max));
  f.emplace_back("beta", std::to_string(s.ev.beta));
  f.emplace_back("use_delta_u", s.ev.use_delta_u ? "true" : "false");
  return f;
}

/// Applies one named field; returns false for an unknown key.
inline bool set_field(ProblemSpec& s, const std::string& key, const std::string& v) {
  using namespace detail;
  if (key == "name") s.name = v;
  else if (key == "model") {
    if (v == "burgers1d") s.model.kind = ModelKind::burgers1d;
    else if (v == "euler1d") s.model.kind = ModelKind::euler1d;
    else if (v == "euler2d") s.model.kind = ModelKind::euler2d;
    else throw ConfigError("key 'model': unknown model '" + v + "'");
  } else if (key == "gamma") s.model.gamma = parse_double(key, v);
  else if (key == "xl") s.xl = parse_double(key, v);
  else if (key == "xr") s.xr = parse_double(key, v);
  else if (key == "yb") s.yb = parse_double(key, v);
  else if (key == "yt") s.yt = parse_double(key, v);
  else if (key == "nx") s.nx = parse_int(key, v);
  else if (key == "ny") s.ny = parse_int(key, v);
  else if (key == "t_final") s.t_final = parse_double(key, v);
  else if (key == "bc") {
    if (v == "periodic") s.bc = BoundaryKind::periodic;
    else if (v == "fixed") s.bc = BoundaryKind::fixed;
    else throw ConfigError("key 'bc': expected periodic or fixed");
  } else if (key == "initial") {
    bool found = false;
    for (auto k : {InitialKind::sine, InitialKind::riemann, InitialKind::shu_osher, InitialKind::radial_riemann,
                   InitialKind::vortex_shock, InitialKind::vortex, InitialKind::uniform})
      if (v == initial_name(k)) {
        s.initial = k;
        found = true;
      }
    if (!found) throw ConfigError("key 'initial': unknown kind '" + v + "'");
  } else if (key == "left") s.left = parse_state(key, v);
  else if (key == "right") s.right = parse_state(key, v);
  else if (key == "split") s.split = parse_double(key, v);
  else if (key == "amplitude") s.amplitude = parse_double(key, v);
  else if (key == "wavenumber") s.wavenumber = parse_double(key, v);
  else if (key == "offset") s.offset = parse_double(key, v);
  else if (key == "vortex_beta") s.vortex_beta = parse_double(key, v);
  else if (key == "vortex_speed") s.vortex_speed = parse_double(key, v);
  else if (key == "forcing_amplitude") s.forcing.amplitude = parse_double(key, v);
  else if (key == "forcing_patch") {
    const auto l = parse_list(key, v);
    if (l.size() != 4) throw ConfigError("key 'forcing_patch': expected x0,x1,y0,y1");
    s.forcing.patch = {l[0], l[1], l[2], l[3]};
  } else if (key == "sponge_width") s.forcing.sponge_width = parse_double(key, v);
  else if (key == "sponge_strength") s.forcing.sponge_strength = parse_double(key, v);
  else if (key == "m") s.m = parse_int(key, v);
  else if (key == "cfl") s.cfl = parse_double(key, v);
  else if (key == "max_steps") s.max_steps = parse_int(key, v);
  else if (key == "viscous_dt_guard") s.viscous_dt_guard = parse_bool(key, v);
  else if (key == "alpha_ev") s.ev.alpha_ev = parse_double(key, v);
  else if (key == "alpha_max") s.ev.alpha_max = parse_double(key, v);
  else if (key == "beta") s.ev.beta = parse_int(key, v);
  else if (key == "use_delta_u") s.ev.use_delta_u = parse_bool(key, v);
  else return false;
  return true;
}

/// Range checks; throws ConfigError naming the offending key.
inline void validate(const ProblemSpec& s) {
  auto fail = [](const std::string& k, const std::string& why) { throw ConfigError("key '" + k + "': " + why); };
  if (s.m < 1 || s.m > kMaxOrder) fail("m", "must be in 1..5");
  if (s.nx < 3) fail("nx", "must be at least 3");
  if (s.dims() == 2 && s.ny < 3) fail("ny", "must be at least 3");
  if (!(s.xr > s.xl)) fail("xr", "must exceed xl");
  if (s.dims() == 2 && !(s.yt > s.yb)) fail("yt", "must exceed yb");
  if (!(s.cfl > 0.0)) fail("cfl", "must be positive");
  if (!(s.t_final >= 0.0)) fail("t_final", "must be nonnegative");
  if (!(s.model.gamma > 1.0)) fail("gamma", "must exceed 1");
  if (!(s.ev.alpha_ev >= 0.0)) fail("alpha_ev", "must be nonnegative");
  if (!(s.ev.alpha_max >= 0.0)) fail("alpha_max", "must be nonnegative");
  if (s.ev.beta != 1 && s.ev.beta != 2) fail("beta", "must be 1 or 2");
  if (s.max_steps < 0) fail("max_steps", "must be nonnegative");
  if (s.forcing.amplitude != 0.0 && s.model.kind != ModelKind::euler2d && s.model.kind != ModelKind::euler1d)
    fail("forcing_amplitude", "forcing needs an Euler model");
  if (s.forcing.sponge_width < 0.0) fail("sponge_width", "must be nonnegative");
  if (s.forcing.sponge_strength < 0.0) fail("sponge_strength", "must be nonnegative");
  if (s.model.is_euler() && s.initial != InitialKind::sine) {
    if (!(s.left[0] > 0.0 && s.left[3] > 0.0)) fail("left", "needs positive density and pressure");
    if (!(s.right[0] > 0.0 && s.right[3] > 0.0)) fail("right", "needs positive density and pressure");
  }
}

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {
      "burgers-smooth", "stationary-shock", "lax",           "sod", "shu-osher", "explosion", "implosion",
      "vortex-shock-1", "vortex-shock-2",   "vortex-periodic", "jet"};
  return names;
}

/// Default forcing amplitude for the jet; see tests/jet_calibration.
inline constexpr double kJetForcingAmplitude = 2.0;

inline ProblemSpec make_problem(const std::string& name, const std::map<std::string, std::string>& overrides = {}) {
  ProblemSpec s;
  s.name = name;
  const double g = 1.4;
  s.model.gamma = g;
  auto euler1d = [&](double xl, double xr, int nx, double t, double cfl, double aev, double amax) {
    s.model.kind = ModelKind::euler1d;
    s.xl = xl;
    s.xr = xr;
    s.nx = nx;
    s.ny = 1;
    s.t_final = t;
    s.cfl = cfl;
    s.m = 3;
    s.bc = BoundaryKind::fixed;
    s.ev.alpha_ev = aev;
    s.ev.alpha_max = amax;
    s.ev.use_delta_u = false;
  };
  auto euler2d = [&](double xl, double xr, double yb, double yt, int nx, int ny, double t, double aev, double amax) {
    s.model.kind = ModelKind::euler2d;
    s.xl = xl;
    s.xr = xr;
    s.yb = yb;
    s.yt = yt;
    s.nx = nx;
    s.ny = ny;
    s.t_final = t;
    s.cfl = 0.2;
    s.m = 3;
    s.bc = BoundaryKind::fixed;
    s.ev.alpha_ev = aev;
    s.ev.alpha_max = amax;
  };

  if (name == "burgers-smooth") {
    s.model.kind = ModelKind::burgers1d;
    s.xl = -std::numbers::pi;
    s.xr = std::numbers::pi;
    s.nx = 32;
    s.m = 3;
    s.cfl = 0.1;
    s.t_final = 0.4;
    s.bc = BoundaryKind::periodic;
    s.initial = InitialKind::sine;
    s.amplitude = -1.0;
    s.wavenumber = 1.0;
    s.offset = 0.3;
  } else if (name == "stationary-shock") {
    euler1d(-0.5, 0.5, 80, 0.5, 0.2, 10.0, 0.3);
    s.initial = InitialKind::riemann;
    s.left = {0.84, 1.08, 0.0, 0.56};
    s.right = {1.0, 0.9, 0.0, 0.71};
  } else if (name == "lax") {
    euler1d(-0.5, 0.5, 100, 0.16, 0.2, 0.5, 0.08);
    s.initial = InitialKind::riemann;
    s.left = {0.445, 0.698, 0.0, 3.528};
    s.right = {0.5, 0.0, 0.0, 0.571};
  } else if (name == "sod") {
    euler1d(-0.5, 0.5, 100, 0.1644, 0.15, 0.2, 0.08);
    s.initial = InitialKind::riemann;
    s.left = {1.0, 0.0, 0.0, 1.0};
    s.right = {0.125, 0.0, 0.0, 0.1};
  } else if (name == "shu-osher") {
    euler1d(-5.0, 5.0, 80, 1.8, 0.15, 0.01, 0.05);
    s.initial = InitialKind::shu_osher;
    s.split = -4.0;
    s.left = {3.86, 2.63, 0.0, 10.33};
    s.right = {1.0, 0.0, 0.0, 1.0};
    s.amplitude = 0.2;
    s.wavenumber = 5.0;
  } else if (name == "explosion" || name == "implosion") {
    euler2d(-1.0, 1.0, -1.0, 1.0, 100, 100, 0.25, 0.1, 0.2);
    s.initial = InitialKind::radial_riemann;
    s.split = 0.4;
    const std::array<double, 4> high{1.0, 0.0, 0.0, 1.0}, low{1.0, 0.0, 0.0, 0.1};
    s.left = name == "explosion" ? high : low;
    s.right = name == "explosion" ? low : high;
  } else if (name == "vortex-shock-1" || name == "vortex-shock-2") {
    const bool first = name == "vortex-shock-1";
    euler2d(-9.0, 3.0, -4.0, 4.0, 720, 480, 4.92, first ? 0.01 : 0.05, first ? 0.04 : 0.07);
    s.initial = InitialKind::vortex_shock;
    s.split = -4.0;
    s.left = {2.18, -0.92, 0.0, 3.17};
    s.vortex_beta = 6.0;
    s.vortex_speed = 2.0;
  } else if (name == "vortex-periodic") {
    euler2d(-5.0, 5.0, -5.0, 5.0, 20, 20, 1.0, 0.0, 0.0);
    s.bc = BoundaryKind::periodic;
    s.initial = InitialKind::vortex;
    s.vortex_beta = 6.0;
    s.vortex_speed = 2.0;
  } else if (name == "jet") {
    euler2d(-15.0, 55.0, -17.5, 17.5, 500, 250, 150.14, 0.03, 0.2);
    s.initial = InitialKind::uniform;
    s.left = {1.0, 0.0, 0.0, 1.0};
    s.right = s.left;
    s.forcing.amplitude = kJetForcingAmplitude;
    s.forcing.patch = {-14.5, -13.5, -0.5, 0.5};
    s.forcing.sponge_width = 5.0;
    s.forcing.sponge_strength = 1.0;
  } else {
    throw ConfigError("unknown problem '" + name + "'");
  }
  for (const auto& [k, v] : overrides) {
    if (k == "name") continue;
    if (!set_field(s, k, v)) throw ConfigError("unknown problem key '" + k + "'");
  }
  validate(s);
  return s;
}

// ---------------------------------------------------------------------------
// Initial data as exact local Taylor expansions.

namespace detail {

template <class Poly>
std::array<Poly, 4> conserved_from_primitive(const Poly& rho, const Poly& u, const Poly& v, const Poly& p,
                                             double gamma, bool two_d) {
  std::array<Poly, 4> q;
  q[0] = rho;
  q[1] = mul_trunc(rho, u);
  if (two_d) {
    q[2] = mul_trunc(rho, v);
    q[3] = (1.0 / (gamma - 1.0)) * p;
    q[3].axpy(0.5, mul_trunc(q[1], u));
    q[3].axpy(0.5, mul_trunc(q[2], v));
  } else {
    q[2] = (1.0 / (gamma - 1.0)) * p;
    q[2].axpy(0.5, mul_trunc(q[1], u));
  }
  return q;
}

template <class Poly>
Poly constant_like(const Poly& shape, double v) {
  Poly p = shape;
  p.c.fill(0.0);
  p.c[0] = v;
  return p;
}

}  // namespace detail

/// Node polynomials on the given grid parity.
template <int N, int NV>
Field1D<N, NV> initial_field(const ProblemSpec& spec, Parity parity) {
  if (spec.dims() != 1) throw ContractError("initial_field: 1D field requested for a 2D problem");
  if (spec.model.nvar() != NV) throw ContractError("initial_field: variable count mismatch");
  Field1D<N, NV> f(Grid1D(spec.xl, spec.xr, spec.nx, parity, spec.periodic()));
  const double g = spec.model.gamma;
  for (int j = 0; j < f.size(); ++j) {
    const double xj = f.grid.x(j);
    const auto x = TaylorPoly<N>::variable(xj, 0.5 * f.grid.h());
    auto& node = f.node[static_cast<std::size_t>(j)];
    auto constant_state = [&](const std::array<double, 4>& st) {
      const auto q = primitive_to_conservative(make_primitive(st[0], st[1], 0.0, st[3], g), spec.model);
      for (int v = 0; v < NV; ++v) node[v] = detail::constant_like(x, q[static_cast<std::size_t>(v)]);
    };
    switch (spec.initial) {
      case InitialKind::sine: {
        auto u = sin(spec.wavenumber * x);
        u *= spec.amplitude;
        u.c[0] += spec.offset;
        if constexpr (NV == 1) {
          node[0] = u;
        } else {
          throw ContractError("initial_field: sine data is defined for Burgers only");
        }
        break;
      }
      case InitialKind::riemann:
        if constexpr (NV == 1) {
          node[0] = detail::constant_like(x, xj <= spec.split ? spec.left[1] : spec.right[1]);
        } else {
          constant_state(xj <= spec.split ? spec.left : spec.right);
        }
        break;
      case InitialKind::shu_osher:
        if constexpr (NV == 3) {
          if (xj <= spec.split) {
            constant_state(spec.left);
          } else {
            auto rho = sin(spec.wavenumber * x);
            rho *= spec.amplitude;
            rho.c[0] += 1.0;
            const auto zero = detail::constant_like(x, 0.0);
            const auto p = detail::constant_like(x, 1.0);
            const auto q = detail::conserved_from_primitive(rho, zero, zero, p, g, false);
            for (int v = 0; v < 3; ++v) node[v] = q[static_cast<std::size_t>(v)];
          }
        } else {
          throw ContractError("initial_field: Shu-Osher data needs 1D Euler");
        }
        break;
      case InitialKind::uniform:
        if constexpr (NV == 1) {
          node[0] = detail::constant_like(x, spec.left[1]);
        } else {
          constant_state(spec.left);
        }
        break;
      default:
        throw ContractError("initial_field: 2D initial data on a 1D grid");
    }
  }
  return f;
}

namespace detail {

/// Isentropic vortex (rho, u, v, p) as tensor polynomials about a node.
template <int N>
std::array<TensorPoly<N>, 4> vortex_state(const TensorPoly<N>& x, const TensorPoly<N>& y, double beta, double speed,
                                          double gamma) {
  const double pi = std::numbers::pi;
  auto r2 = mul_trunc(x, x) + mul_trunc(y, y);
  auto arg = -1.0 * r2;
  arg.c[0] += 1.0;
  const auto e = exp(arg);             // e^{1 - r^2}
  const auto eh = exp(0.5 * arg);      // e^{(1 - r^2)/2}
  auto base = (-(gamma - 1.0) * beta * beta / (8.0 * gamma * pi * pi)) * e;
  base.c[0] += 1.0;
  const auto rho = pow(base, 1.0 / (gamma - 1.0));
  auto u = (-beta / (2.0 * pi)) * mul_trunc(y, eh);
  u.c[0] += speed;
  const auto v = (beta / (2.0 * pi)) * mul_trunc(x, eh);
  const auto p = pow(rho, gamma);
  return {rho, u, v, p};
}

}  // namespace detail

template <int N, int NV>
Field2D<N, NV> initial_field_2d(const ProblemSpec& spec, Parity parity) {
  static_assert(NV == 4);
  if (spec.dims() != 2) throw ContractError("initial_field_2d: 2D field requested for a 1D problem");
  Field2D<N, NV> f(Grid2D(spec.xl, spec.xr, spec.nx, spec.yb, spec.yt, spec.ny, parity, spec.periodic()));
  const double g = spec.model.gamma;
  const std::array<double, 2> sc{0.5 * f.grid.hx(), 0.5 * f.grid.hy()};
  for (int i = 0; i < f.grid.nx(); ++i)
    for (int j = 0; j < f.grid.ny(); ++j) {
      const double xi = f.grid.gx.x(i), yj = f.grid.gy.x(j);
      auto& node = f.node[static_cast<std::size_t>(f.grid.index(i, j))];
      TensorPoly<N> x({xi, yj}, sc), y({xi, yj}, sc);
      x(0, 0) = xi;
      x(1, 0) = sc[0];
      y(0, 0) = yj;
      y(0, 1) = sc[1];
      auto constant_state = [&](const std::array<double, 4>& st) {
        const auto q = primitive_to_conservative(make_primitive(st[0], st[1], st[2], st[3], g), spec.model);
        for (int v = 0; v < 4; ++v) node[v] = detail::constant_like(x, q[static_cast<std::size_t>(v)]);
      };
      auto vortex = [&] {
        const auto w = detail::vortex_state(x, y, spec.vortex_beta, spec.vortex_speed, g);
        const auto q = detail::conserved_from_primitive(w[0], w[1], w[2], w[3], g, true);
        for (int v = 0; v < 4; ++v) node[v] = q[static_cast<std::size_t>(v)];
      };
      switch (spec.initial) {
        case InitialKind::radial_riemann:
          constant_state(xi * xi + yj * yj <= spec.split * spec.split ? spec.left : spec.right);
          break;
        case InitialKind::riemann:
          constant_state(xi <= spec.split ? spec.left : spec.right);
          break;
        case InitialKind::vortex_shock:
          if (xi <= spec.split)
            constant_state(spec.left);
          else
            vortex();
          break;
        case InitialKind::vortex:
          vortex();
          break;
        case InitialKind::uniform:
          constant_state(spec.left);
          break;
        default:
          throw ContractError("initial_field_2d: 1D initial data on a 2D grid");
      }
    }
  return f;
}

// ---------------------------------------------------------------------------
// Jet nozzle forcing and boundary sponge.

namespace detail {

/// (1 - s^2)^4 on |s| < 1, zero outside; s is a Taylor variable.
template <int N>
TaylorPoly<N> bump(const TaylorPoly<N>& s) {
  if (std::abs(s.c[0]) >= 1.0) return constant_like(s, 0.0);
  auto t = -1.0 * mul_trunc(s, s);
  t.c[0] += 1.0;
  const auto t2 = mul_trunc(t, t);
  return mul_trunc(t2, t2);
}

}  // namespace detail

/// Height-1 compact bump on the patch, as a tensor polynomial about (cx, cy).
template <int N>
TensorPoly<N> patch_bump(const JetForcing& jf, double cx, double cy, double sx, double sy) {
  const double hx = 0.5 * (jf.patch[1] - jf.patch[0]), mx = 0.5 * (jf.patch[0] + jf.patch[1]);
  const double hy = 0.5 * (jf.patch[3] - jf.patch[2]), my = 0.5 * (jf.patch[2] + jf.patch[3]);
  TaylorPoly<N> s(cx, sx), t(cy, sy);
  s.c[0] = (cx - mx) / hx;
  if constexpr (N > 1) s.c[1] = sx / hx;
  t.c[0] = (cy - my) / hy;
  if constexpr (N > 1) t.c[1] = sy / hy;
  auto b = outer(detail::bump(s), detail::bump(t));
  b.center = {cx, cy};
  b.scale = {sx, sy};
  return b;
}

/// 1D bump over [patch[0], patch[1]].
template <int N>
TaylorPoly<N> patch_bump_1d(const JetForcing& jf, double cx, double sx) {
  const double hx = 0.5 * (jf.patch[1] - jf.patch[0]), mx = 0.5 * (jf.patch[0] + jf.patch[1]);
  TaylorPoly<N> s(cx, sx);
  s.c[0] = (cx - mx) / hx;
  if constexpr (N > 1) s.c[1] = sx / hx;
  auto b = detail::bump(s);
  b.center = cx;
  b.scale = sx;
  return b;
}

/// Per-node source polynomials: amplitude * bump in the x-momentum equation.
template <int N, int NV>
std::vector<std::array<TensorPoly<N>, NV>> jet_forcing(const Grid2D& grid, const JetForcing& jf) {
  std::vector<std::array<TensorPoly<N>, NV>> src(static_cast<std::size_t>(grid.nodes()));
  const double sx = 0.5 * grid.hx(), sy = 0.5 * grid.hy();
  for (int i = 0; i < grid.nx(); ++i)
    for (int j = 0; j < grid.ny(); ++j) {
      auto& node = src[static_cast<std::size_t>(grid.index(i, j))];
      const double cx = grid.gx.x(i), cy = grid.gy.x(j);
      for (auto& p : node) p = TensorPoly<N>({cx, cy}, {sx, sy});
      if (jf.amplitude != 0.0) node[1] = jf.amplitude * patch_bump<N>(jf, cx, cy, sx, sy);
    }
  return src;
}

template <int N, int NV>
std::vector<std::array<TaylorPoly<N>, NV>> jet_forcing(const Grid1D& grid, const JetForcing& jf) {
  std::vector<std::array<TaylorPoly<N>, NV>> src(static_cast<std::size_t>(grid.nodes()));
  const double sx = 0.5 * grid.h();
  for (int j = 0; j < grid.nodes(); ++j) {
    auto& node = src[static_cast<std::size_t>(j)];
    for (auto& p : node) p = TaylorPoly<N>(grid.x(j), sx);
    if (jf.amplitude != 0.0) node[1] = jf.amplitude * patch_bump_1d<N>(jf, grid.x(j), sx);
  }
  return src;
}

/// Damping rate of the sponge at (x, y): a smoothstep ramp over the layer
/// adjoining the right, bottom and top boundaries (the left boundary hosts the nozzle).
inline double sponge_rate(const ProblemSpec& s, double x, double y) {
  const double w = s.forcing.sponge_width;
  if (!(w > 0.0) || !(s.forcing.sponge_strength > 0.0)) return 0.0;
  double depth = std::max(0.0, x - (s.xr - w));
  if (s.dims() == 2) {
    depth = std::max(depth, (s.yb + w) - y);
    depth = std::max(depth, y - (s.yt - w));
  }
  const double z = std::clamp(depth / w, 0.0, 1.0);
  return s.forcing.sponge_strength * z * z * (3.0 - 2.0 * z);
}

/// Relaxes node polynomials toward the ambient (left) state:
/// q <- q_amb + exp(-rate dt)(q - q_amb). Returns the change in total mass.
template <class Field>
double apply_sponge(Field& f, const ProblemSpec& s, double dt) {
  if (!(s.forcing.sponge_width > 0.0) || !(s.forcing.sponge_strength > 0.0)) return 0.0;
  const auto amb = primitive_to_conservative(
      make_primitive(s.left[0], s.left[1], s.left[2], s.left[3], s.model.gamma), s.model);
  double dmass = 0.0;
  for (int k = 0; k < f.size(); ++k) {
    auto& node = f.node[static_cast<std::size_t>(k)];
    double x = 0.0, y = 0.0;
    if constexpr (requires { node[0].center[1]; }) {
      x = node[0].center[0];
      y = node[0].center[1];
    } else {
      x = node[0].center;
    }
    const double rate = sponge_rate(s, x, y);
    if (rate == 0.0) continue;
    const double d = std::exp(-rate * dt);
    const double before = integrate_cell(node[0]);
    for (std::size_t v = 0; v < node.size(); ++v) {
      node[v].c[0] -= amb[v];
      node[v] *= d;
      node[v].c[0] += amb[v];
    }
    dmass += integrate_cell(node[0]) - before;
  }
  return dmass;
}

// ---------------------------------------------------------------------------
// Exact solutions where one exists.

/// Burgers solution for sine data before wave breaking, by solving the
/// characteristic equation x = x0 + u0(x0) t for x0.
inline double burgers_sine_exact(const ProblemSpec& s, double x, double t) {
  auto u0 = [&](double z) { return s.amplitude * std::sin(s.wavenumber * z) + s.offset; };
  const double umax = std::abs(s.amplitude) + std::abs(s.offset);
  double lo = x - umax * t - 1e-12, hi = x + umax * t + 1e-12;
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = z + u0(z) * t - x;
    if (g > 0.0) hi = z;
    else lo = z;
    const double dg = 1.0 + s.amplitude * s.wavenumber * std::cos(s.wavenumber * z) * t;
    double next = dg > 0.0 ? z - g / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) < 1e-16 * (1.0 + std::abs(z))) {
      z = next;
      break;
    }
    z = next;
  }
  return u0(z);
}

/// Exact value of a named snapshot column at (x, t), when the problem has one:
/// sine Burgers data before breaking and 1D Riemann data.
inline std::optional<double> exact_value(const ProblemSpec& s, const std::string& column, double x, double t) {
  if (s.model.kind == ModelKind::burgers1d && s.initial == InitialKind::sine && column == "u") {
    if (s.amplitude != 0.0 && t * std::abs(s.amplitude * s.wavenumber) >= 1.0) return std::nullopt;
    return burgers_sine_exact(s, x, t);
  }
  if (s.model.kind == ModelKind::euler1d && s.initial == InitialKind::riemann) {
    const auto L = left_state(s), R = right_state(s);
    const PrimitiveState w =
        t > 0.0 ? exact_riemann(L, R, s.model.gamma, (x - s.split) / t) : (x <= s.split ? L : R);
    if (column == "rho") return w.rho;
    if (column == "u") return w.u;
    if (column == "p") return w.p;
    if (column == "rho_u") return w.rho * w.u;
    if (column == "E") return w.p / (s.model.gamma - 1.0) + 0.5 * w.rho * w.u * w.u;
  }
  return std::nullopt;
}

}  // namespace hermitefc
