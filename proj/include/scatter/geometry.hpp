#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "scatter/common.hpp"

namespace scatter::geometry {

/// Unit direction ω = (cos θ, sin θ).
class Direction {
 public:
  Direction() = default;
  explicit Direction(double theta) : theta_(theta), u_{std::cos(theta), std::sin(theta)} {}
  static Direction from_vector(const Vec2& v);

  double theta() const { return theta_; }
  const Vec2& unit() const { return u_; }
  /// ω^⊥ = (ω₂, −ω₁).
  Vec2 perp() const { return {u_.y, -u_.x}; }
  /// ω₁ + iω₂.
  cplx as_complex() const { return {u_.x, u_.y}; }

 private:
  double theta_ = 0.0;
  Vec2 u_{1.0, 0.0};
};

using Polygon = std::vector<Vec2>;   // closed vertex loop, last vertex not repeated
using Polyline = std::vector<Vec2>;  // open vertex chain

double signed_area(std::span<const Vec2> loop);
double area(std::span<const Vec2> loop);
bool is_simple(std::span<const Vec2> loop);
bool point_in_polygon(const Vec2& p, std::span<const Vec2> loop);
/// Distance from p to the closed segment [a, b].
double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
/// Distance from p to the filled polygon (0 when inside).
double distance_to_polygon(const Vec2& p, std::span<const Vec2> loop);
/// Counterclockwise convex hull (Andrew's monotone chain).
Polygon convex_hull(std::vector<Vec2> pts);
/// Hausdorff distance between two filled convex polygons.
double hausdorff_convex(std::span<const Vec2> a, std::span<const Vec2> b);

/// Union of disjoint simple polygons inside the disc of radius R.
struct PolygonalObstacle {
  std::vector<Polygon> components;  // each counterclockwise after validate()
  double R = 0.0;

  /// Checks the invariants and orients every component counterclockwise.
  void validate();
};

/// Union of disjoint piecewise-linear arcs, each on the boundary of the witness polygon.
struct CrackSet {
  std::vector<Polyline> arcs;
  Polygon witness;
  double R = 0.0;

  void validate() const;
};

using Shape = std::variant<PolygonalObstacle, CrackSet>;

/// All vertices of a shape (the support function is attained on them).
std::vector<Vec2> vertices(const Shape& shape);
double diameter(const Shape& shape);

double support_function(std::span<const Vec2> pts, const Direction& omega);
double support_function(const Shape& shape, const Direction& omega);

bool is_regular_direction(const Shape& shape, const Direction& omega, double tol = 1e-9);

struct SupportSample {
  Direction omega;
  double h = 0.0;
};

struct HullResult {
  Polygon vertices;             // counterclockwise; empty when infeasible
  bool empty = false;
  std::vector<std::size_t> violating;  // constraint indices responsible for emptiness
};

/// Intersection of the half-planes {x·ω ≤ h} clipped from a box of side 4R.
/// When bound_R is not given it is derived from the samples.
HullResult hull_from_support(std::span<const SupportSample> samples,
                             std::optional<double> bound_R = std::nullopt);

/// Scene file (JSON): {version: 1, type: "obstacle"|"crack", components, R[, witness]}.
Shape read_scene(const std::string& path);
Shape parse_scene(const std::string& text);
std::string scene_to_json(const Shape& shape);
double scene_radius(const Shape& shape);
double enclosing_R(const Shape& shape);

}  // namespace scatter::geometry
