#pragma once

#include <memory>
#include <vector>

#include "scatter/common.hpp"
#include "scatter/farfield.hpp"
#include "scatter/geometry.hpp"

namespace scatter::forward {

using geometry::CrackSet;
using geometry::Direction;
using geometry::PolygonalObstacle;
using geometry::Shape;

struct DiscretizationParams {
  int panels_per_edge = 2;        // minimum number of uniform panels per edge
  double max_panel_length = 0.25; // uniform panels are at most this long
  int grading_levels = 10;        // dyadic refinements toward a right-angle corner
  int order = 12;                 // Gauss-Legendre nodes per panel
  int crack_degree = 40;          // Chebyshev modes per crack arc
  int crack_panels = 24;          // quadrature panels per crack arc
  bool combined_source = false;   // not available; rejected with an input error

  void validate() const;
};

/// Straight Gauss-Legendre panel [a, b] on one polygon edge.
struct Panel {
  Vec2 a, b;
  std::size_t first = 0;  // index of the first node
  int component = 0;
  int edge = 0;
  bool touches_corner = false;
  double length() const { return norm(b - a); }
};

/// Nyström nodes on a polygonal boundary, graded dyadically toward corners.
/// normals[i] is the unit normal pointing into the obstacle (outward from the exterior domain).
struct BoundaryDiscretization {
  int order = 16;
  std::vector<Panel> panels;
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  std::vector<Vec2> normals;

  static BoundaryDiscretization build(const PolygonalObstacle& obs, const DiscretizationParams& p);
  std::size_t size() const { return nodes.size(); }
};

struct SolveInfo {
  double condition = 0.0;  // 1-norm condition estimate of the system matrix
  double residual = 0.0;   // ‖Aψ − b‖∞ / ‖b‖∞
  bool resonance = false;
  std::size_t unknowns = 0;
};

class ScatterSolution {
 public:
  struct Impl;

  ScatterSolution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  double k() const;
  const Direction& d() const;
  const Shape& shape() const;
  const SolveInfo& info() const;

  /// Scattered field with gradient at a point off the boundary.
  FieldValue scattered(const Vec2& x) const;
  /// Incident plus scattered.
  FieldValue total(const Vec2& x) const;
  /// F(φ) with u^s(rφ) ≈ e^{ikr}/√r F(φ).
  cplx far_field(double phi) const;

  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

/// Single-layer ansatz u^s = Sψ; the exterior Neumann jump gives (−½ + K')ψ = −∂_n u^i.
ScatterSolution solve_obstacle(const PolygonalObstacle& obs, double k, const Direction& d,
                               const DiscretizationParams& p = {});

/// Double-layer ansatz u^s = Dμ with μ the jump across the arcs; the weak hypersingular
/// equation is solved by Galerkin with √(1−t²)U_n(t) per arc.
ScatterSolution solve_crack(const CrackSet& cracks, double k, const Direction& d,
                            const DiscretizationParams& p = {});

ScatterSolution solve(const Shape& shape, double k, const Direction& d, const DiscretizationParams& p = {});

std::vector<cplx> far_field(const ScatterSolution& sol, const std::vector<double>& angles);

farfield::FarFieldDataset far_field_dataset(const ScatterSolution& sol, const farfield::Aperture& ap, int n);

/// u and ∂u/∂r at n uniform points of |x| = R.
farfield::CauchyData cauchy_data_on_circle(const ScatterSolution& sol, double R, int n);

/// Sup over off-node check points of |∂_n u| relative to |∂_n u^i|; corner panels excluded.
double boundary_residual(const ScatterSolution& sol);

/// Closed rectangle of the given width around the segment [a, b].
PolygonalObstacle thin_obstacle(const Vec2& a, const Vec2& b, double width, double R);

}  // namespace scatter::forward
