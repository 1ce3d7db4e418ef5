#pragma once

#include <vector>

#include "scatter/forward.hpp"

namespace scatter::forward {

/// Piecewise-linear arc parametrized by normalized arclength t ∈ [−1, 1].
struct CrackArc {
  geometry::Polyline pts;
  std::vector<double> s;  // cumulative arclength at the vertices
  double L = 0.0;

  explicit CrackArc(geometry::Polyline p);
  int segment(double t) const;
  Vec2 point(double t) const;
  Vec2 normal(double t) const;  // left normal of the traversal direction
  /// Parameters t of the interior vertices.
  std::vector<double> kinks() const;
};

/// Quadrature for evaluating the double-layer potential of one arc.
struct CrackQuad {
  std::vector<Vec2> y;
  std::vector<Vec2> nu;
  std::vector<double> w;  // includes ds = (L/2) sin θ dθ
  std::vector<cplx> mu;
};

struct ScatterSolution::Impl {
  Shape shape;
  double k = 1.0;
  Direction d;
  SolveInfo info;
  bool crack = false;

  BoundaryDiscretization disc;
  std::vector<cplx> psi;

  std::vector<CrackArc> arcs;
  std::vector<std::vector<cplx>> coeffs;
  std::vector<CrackQuad> quads;
};

FieldValue crack_scattered(const ScatterSolution::Impl& s, const Vec2& x);
cplx crack_far_field(const ScatterSolution::Impl& s, double phi);

inline FieldValue incident(const Vec2& x, double k, const Direction& d) {
  const cplx u = std::exp(kI * k * dot(x, d.unit()));
  return {u, kI * k * d.unit().x * u, kI * k * d.unit().y * u};
}

}  // namespace scatter::forward
