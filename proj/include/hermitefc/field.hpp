#pragma once
// Piecewise polynomial solutions on one parity of a staggered grid. Node j
// carries one polynomial per conserved variable, expanded about the node with
// scale h/2, i.e. valid on the cell of the opposite grid centered at the node.

#include <array>
#include <vector>

#include "hermitefc/hermite.hpp"
#include "hermitefc/physics.hpp"
#include "hermitefc/polyalg.hpp"

namespace hermitefc {

template <int N, int NV>
struct Field1D {
  static constexpr int ncoef = N;
  static constexpr int nvar = NV;
  using Poly = TaylorPoly<N>;
  using Node = std::array<Poly, NV>;

  Grid1D grid;
  double time = 0.0;
  std::vector<Node> node;

  Field1D() = default;
  explicit Field1D(const Grid1D& g, double t = 0.0) : grid(g), time(t) {
    node.resize(static_cast<std::size_t>(g.nodes()));
    const double s = 0.5 * g.h();
    for (int j = 0; j < g.nodes(); ++j)
      for (auto& p : node[static_cast<std::size_t>(j)]) {
        p.center = g.x(j);
        p.scale = s;
      }
  }

  int size() const { return static_cast<int>(node.size()); }
  double value(int j, int var) const { return node[static_cast<std::size_t>(j)][static_cast<std::size_t>(var)].c[0]; }
  ConservedState state(int j) const {
    ConservedState q{};
    for (int v = 0; v < NV; ++v) q[static_cast<std::size_t>(v)] = value(j, v);
    return q;
  }
};

template <int N, int NV>
struct Field2D {
  static constexpr int ncoef = N;
  static constexpr int nvar = NV;
  using Poly = TensorPoly<N>;
  using Node = std::array<Poly, NV>;

  Grid2D grid;
  double time = 0.0;
  std::vector<Node> node;

  Field2D() = default;
  explicit Field2D(const Grid2D& g, double t = 0.0) : grid(g), time(t) {
    node.resize(static_cast<std::size_t>(g.nodes()));
    const std::array<double, 2> s{0.5 * g.hx(), 0.5 * g.hy()};
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j)
        for (auto& p : node[static_cast<std::size_t>(g.index(i, j))]) {
          p.center = {g.gx.x(i), g.gy.x(j)};
          p.scale = s;
        }
  }

  int size() const { return static_cast<int>(node.size()); }
  double value(int idx, int var) const {
    return node[static_cast<std::size_t>(idx)][static_cast<std::size_t>(var)].c[0];
  }
  ConservedState state(int idx) const {
    ConservedState q{};
    for (int v = 0; v < NV; ++v) q[static_cast<std::size_t>(v)] = value(idx, v);
    return q;
  }
};

/// max over nodes of the model's wave speed; throws on nonpositive states.
template <class Field>
double max_wave_speed(const Field& f, const FluxModel& model) {
  double best = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    const auto& p = f.node[static_cast<std::size_t>(j)][0];
    double x = 0.0, y = 0.0;
    if constexpr (requires { p.center[1]; }) {
      x = p.center[0];
      y = p.center[1];
    } else {
      x = p.center;
    }
    best = std::max(best, wave_speed(conservative_to_primitive(f.state(j), model, x, y), model));
  }
  return best;
}

}  // namespace hermitefc
