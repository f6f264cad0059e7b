#pragma once

#include <vector>

#include <Eigen/Core>

namespace rigcov {

using Point = Eigen::Vector2d;
using Polygon = std::vector<Point>;

/// Positive for counter-clockwise vertex order.
double signed_area(const Polygon& poly);

/// Area centroid; requires non-zero area.
Point polygon_centroid(const Polygon& poly);

/// Exact integral of |q - p|^2 over the polygon.
double polygon_second_moment(const Polygon& poly, const Point& about);

/// Keeps the part of a convex polygon with normal . q <= offset.
Polygon clip_halfplane(const Polygon& poly, const Point& normal, double offset);

bool point_in_convex(const Polygon& ccw, const Point& q, double tol = 0.0);

/// Half-plane a_k . q <= b_k with unit normal a_k.
struct HalfPlane {
  Point normal;
  double offset = 0.0;
};

/// Convex polygon with counter-clockwise vertices and positive area.
class ConvexRegion {
 public:
  /// Throws invalid-input when the vertices are not a strictly positive-area
  /// counter-clockwise convex polygon.
  explicit ConvexRegion(Polygon vertices);

  static ConvexRegion unit_square();

  const Polygon& vertices() const { return vertices_; }
  const std::vector<HalfPlane>& halfplanes() const { return halfplanes_; }
  double area() const { return signed_area(vertices_); }

  bool contains(const Point& q, double tol = 1e-12) const;
  /// Closest point of the region.
  Point project(const Point& q) const;
  /// Every half-plane pushed inward by `margin`. Throws invalid-input when
  /// nothing of positive area is left.
  ConvexRegion shrunk(double margin) const;

 private:
  Polygon vertices_;
  std::vector<HalfPlane> halfplanes_;
};

}  // namespace rigcov
