#include "rigcov/density.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rigcov/error.h"

namespace rigcov {

DensityField::DensityField(Variant field) : field_(std::move(field)) {
  if (const auto* u = std::get_if<UniformDensity>(&field_)) {
    if (!(u->value > 0.0)) throw Error(ErrorKind::kInvalidInput, "uniform density must be positive");
  } else if (const auto* g = std::get_if<GaussianMixture>(&field_)) {
    if (g->components.empty() && !(g->baseline > 0.0)) {
      throw Error(ErrorKind::kInvalidInput, "empty Gaussian mixture");
    }
    if (g->baseline < 0.0) throw Error(ErrorKind::kInvalidInput, "negative density baseline");
    for (const auto& c : g->components) {
      if (!(c.weight > 0.0) || !(c.covariance_diag.minCoeff() > 0.0)) {
        throw Error(ErrorKind::kInvalidInput,
                    "Gaussian components need positive weight and variances");
      }
    }
  } else {
    const auto& grid = std::get<GridDensity>(field_);
    if (grid.nx < 1 || grid.ny < 1 ||
        grid.values.size() != static_cast<std::size_t>(grid.nx) * grid.ny) {
      throw Error(ErrorKind::kInvalidInput, "grid density size mismatch");
    }
    if (!((grid.upper - grid.lower).minCoeff() > 0.0)) {
      throw Error(ErrorKind::kInvalidInput, "grid density needs a non-empty box");
    }
    for (double v : grid.values) {
      if (!(v > 0.0)) throw Error(ErrorKind::kInvalidInput, "grid density values must be positive");
    }
  }
}

namespace {

double gaussian_mixture(const GaussianMixture& g, const Point& q) {
  double value = g.baseline;
  for (const auto& c : g.components) {
    const Point d = q - c.mean;
    value += c.weight * std::exp(-0.5 * (d.x() * d.x() / c.covariance_diag.x() +
                                         d.y() * d.y() / c.covariance_diag.y()));
  }
  return value;
}

int grid_index(double v, double lo, double hi, int cells) {
  const int k = static_cast<int>(std::floor((v - lo) / (hi - lo) * cells));
  return std::clamp(k, 0, cells - 1);
}

}  // namespace

double DensityField::operator()(const Point& q) const {
  return std::visit(
      [&q](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          return f.value;
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          return gaussian_mixture(f, q);
        } else {
          const int ix = grid_index(q.x(), f.lower.x(), f.upper.x(), f.nx);
          const int iy = grid_index(q.y(), f.lower.y(), f.upper.y(), f.ny);
          return f.values[static_cast<std::size_t>(iy) * f.nx + ix];
        }
      },
      field_);
}

namespace {

CellMoments exact_constant(const Polygon& poly, double value, const Point& about) {
  CellMoments m;
  const double area = signed_area(poly);
  if (area <= 0.0) return m;
  m.mass = value * area;
  m.first = m.mass * polygon_centroid(poly);
  m.second = value * polygon_second_moment(poly, about);
  return m;
}

void accumulate(CellMoments& into, const CellMoments& part) {
  into.mass += part.mass;
  into.first += part.first;
  into.second += part.second;
}

CellMoments exact_grid(const Polygon& cell, const GridDensity& grid, const Point& about) {
  Point lo = cell.front();
  Point hi = cell.front();
  for (const Point& p : cell) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int ix0 = grid_index(lo.x(), grid.lower.x(), grid.upper.x(), grid.nx);
  const int ix1 = grid_index(hi.x(), grid.lower.x(), grid.upper.x(), grid.nx);
  const int iy0 = grid_index(lo.y(), grid.lower.y(), grid.upper.y(), grid.ny);
  const int iy1 = grid_index(hi.y(), grid.lower.y(), grid.upper.y(), grid.ny);
  const double dx = (grid.upper.x() - grid.lower.x()) / grid.nx;
  const double dy = (grid.upper.y() - grid.lower.y()) / grid.ny;
  CellMoments total;
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      // Border cells extend to infinity so points outside the box take the
      // nearest value.
      Polygon piece = cell;
      if (ix > 0) piece = clip_halfplane(piece, Point(-1, 0), -(grid.lower.x() + ix * dx));
      if (ix < grid.nx - 1) piece = clip_halfplane(piece, Point(1, 0), grid.lower.x() + (ix + 1) * dx);
      if (iy > 0) piece = clip_halfplane(piece, Point(0, -1), -(grid.lower.y() + iy * dy));
      if (iy < grid.ny - 1) piece = clip_halfplane(piece, Point(0, 1), grid.lower.y() + (iy + 1) * dy);
      if (piece.size() < 3) continue;
      accumulate(total, exact_constant(piece, grid.values[static_cast<std::size_t>(iy) * grid.nx + ix], about));
    }
  }
  return total;
}

struct TriangleRule {
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;  // sum to one
};

const TriangleRule& rule_for_order(int order) {
  static const TriangleRule kCentroid{{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1.0}};
  static const TriangleRule kThreePoint{
      {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}},
      {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  static const TriangleRule kSevenPoint = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, b1 = (9.0 + 2.0 * s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0, b2 = (9.0 - 2.0 * s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
    return TriangleRule{{{1.0 / 3, 1.0 / 3, 1.0 / 3},
                         {a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
                         {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}},
                        {0.225, w1, w1, w1, w2, w2, w2}};
  }();
  switch (order) {
    case 1: return kCentroid;
    case 2: return kThreePoint;
    case 5: return kSevenPoint;
    default:
      throw Error(ErrorKind::kInvalidInput, "quadrature order must be 1, 2 or 5");
  }
}

void integrate_triangle(const Point& a, const Point& b, const Point& c, int level,
                        const TriangleRule& rule, const DensityField& density,
                        const Point& about, CellMoments& out) {
  if (level > 0) {
    const Point ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    integrate_triangle(a, ab, ca, level - 1, rule, density, about, out);
    integrate_triangle(ab, b, bc, level - 1, rule, density, about, out);
    integrate_triangle(ca, bc, c, level - 1, rule, density, about, out);
    integrate_triangle(ab, bc, ca, level - 1, rule, density, about, out);
    return;
  }
  const double area = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  for (std::size_t k = 0; k < rule.weights.size(); ++k) {
    const auto& w = rule.barycentric[k];
    const Point q = w[0] * a + w[1] * b + w[2] * c;
    const double phi = density(q) * rule.weights[k] * area;
    out.mass += phi;
    out.first += phi * q;
    out.second += phi * (q - about).squaredNorm();
  }
}

CellMoments quadrature_at_level(const Polygon& cell, int level, const TriangleRule& rule,
                                const DensityField& density, const Point& about) {
  CellMoments m;
  for (std::size_t k = 1; k + 1 < cell.size(); ++k) {
    integrate_triangle(cell[0], cell[k], cell[k + 1], level, rule, density, about, m);
  }
  return m;
}

bool agrees(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace

CellMoments integrate_cell(const Polygon& cell, const DensityField& density,
                           const Point& about, const QuadratureOptions& options) {
  if (cell.size() < 3) return {};
  if (const auto* u = std::get_if<UniformDensity>(&density.variant())) {
    return exact_constant(cell, u->value, about);
  }
  if (const auto* grid = std::get_if<GridDensity>(&density.variant())) {
    return exact_grid(cell, *grid, about);
  }
  const TriangleRule& rule = rule_for_order(options.order);
  CellMoments coarse = quadrature_at_level(cell, 0, rule, density, about);
  for (int level = 1; level <= options.max_level; ++level) {
    CellMoments fine = quadrature_at_level(cell, level, rule, density, about);
    const double tol = options.tolerance;
    if (agrees(coarse.mass, fine.mass, tol) && agrees(coarse.first.x(), fine.first.x(), tol) &&
        agrees(coarse.first.y(), fine.first.y(), tol) && agrees(coarse.second, fine.second, tol)) {
      return fine;
    }
    coarse = fine;
  }
  return coarse;
}

}  // namespace rigcov
