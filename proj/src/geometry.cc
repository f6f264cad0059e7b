#include "rigcov/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rigcov/error.h"

namespace rigcov {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

double signed_area(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t k = 0; k < n; ++k) twice += cross(poly[k], poly[(k + 1) % n]);
  return 0.5 * twice;
}

Point polygon_centroid(const Polygon& poly) {
  const std::size_t n = poly.size();
  // Shift to the first vertex to keep the cross products well conditioned.
  const Point origin = poly.front();
  double twice_area = 0.0;
  Point acc = Point::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = poly[k] - origin;
    const Point b = poly[(k + 1) % n] - origin;
    const double w = cross(a, b);
    twice_area += w;
    acc += w * (a + b);
  }
  if (twice_area == 0.0) {
    throw Error(ErrorKind::kDegenerateMass, "centroid of a zero-area polygon");
  }
  return origin + acc / (3.0 * twice_area);
}

double polygon_second_moment(const Polygon& poly, const Point& about) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = poly[k] - about;
    const Point b = poly[(k + 1) % n] - about;
    const double w = cross(a, b);
    acc += w * (a.x() * a.x() + a.x() * b.x() + b.x() * b.x() + a.y() * a.y() +
                a.y() * b.y() + b.y() * b.y());
  }
  return acc / 12.0;
}

Polygon clip_halfplane(const Polygon& poly, const Point& normal, double offset) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const Point& a = poly[k];
    const Point& b = poly[(k + 1) % n];
    const double da = normal.dot(a) - offset;
    const double db = normal.dot(b) - offset;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  if (out.size() < 3) out.clear();
  return out;
}

bool point_in_convex(const Polygon& ccw, const Point& q, double tol) {
  const std::size_t n = ccw.size();
  if (n < 3) return false;
  for (std::size_t k = 0; k < n; ++k) {
    const Point edge = ccw[(k + 1) % n] - ccw[k];
    const double len = edge.norm();
    if (len == 0.0) continue;
    if (cross(edge, q - ccw[k]) / len < -tol) return false;
  }
  return true;
}

ConvexRegion::ConvexRegion(Polygon vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw Error(ErrorKind::kInvalidInput, "region needs at least 3 vertices");
  for (const Point& p : vertices_) {
    if (!p.allFinite()) throw Error(ErrorKind::kInvalidInput, "non-finite region vertex");
  }
  if (!(signed_area(vertices_) > 0.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "region must have positive area with counter-clockwise vertices");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Point e1 = vertices_[(k + 1) % n] - vertices_[k];
    const Point e2 = vertices_[(k + 2) % n] - vertices_[(k + 1) % n];
    if (cross(e1, e2) < 0.0) throw Error(ErrorKind::kInvalidInput, "region is not convex");
    const double len = e1.norm();
    if (len == 0.0) throw Error(ErrorKind::kInvalidInput, "repeated region vertex");
    // Outward normal of a CCW edge is (dy, -dx).
    const Point normal(e1.y() / len, -e1.x() / len);
    halfplanes_.push_back({normal, normal.dot(vertices_[k])});
  }
}

ConvexRegion ConvexRegion::unit_square() {
  return ConvexRegion({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)});
}

bool ConvexRegion::contains(const Point& q, double tol) const {
  for (const HalfPlane& h : halfplanes_) {
    if (h.normal.dot(q) - h.offset > tol) return false;
  }
  return true;
}

Point ConvexRegion::project(const Point& q) const {
  if (contains(q, 0.0)) return q;
  Point best = vertices_.front();
  double best_dist = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point& a = vertices_[k];
    const Point& b = vertices_[(k + 1) % n];
    const Point ab = b - a;
    const double t = std::clamp((q - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const Point c = a + t * ab;
    const double dist = (q - c).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

ConvexRegion ConvexRegion::shrunk(double margin) const {
  Polygon poly = vertices_;
  for (const HalfPlane& h : halfplanes_) {
    poly = clip_halfplane(poly, h.normal, h.offset - margin);
  }
  // Drop vertices that coincide after clipping.
  Polygon cleaned;
  for (const Point& p : poly) {
    if (cleaned.empty() || (p - cleaned.back()).norm() > 1e-14) cleaned.push_back(p);
  }
  if (cleaned.size() > 1 && (cleaned.front() - cleaned.back()).norm() <= 1e-14) {
    cleaned.pop_back();
  }
  if (cleaned.size() < 3 || signed_area(cleaned) <= 0.0) {
    throw Error(ErrorKind::kInvalidInput, "region shrunk by margin is empty");
  }
  return ConvexRegion(std::move(cleaned));
}

}  // namespace rigcov
