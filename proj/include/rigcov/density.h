#pragma once

#include <variant>
#include <vector>

#include "rigcov/geometry.h"

namespace rigcov {

struct UniformDensity {
  double value = 1.0;
};

struct GaussianComponent {
  Point mean = Point::Zero();
  /// Diagonal of the covariance (variances along x and y).
  Point covariance_diag = Point::Ones();
  double weight = 1.0;
};

/// phi(q) = baseline + sum_k w_k exp(-0.5 (q - m_k)^T diag(s_k)^-1 (q - m_k)).
struct GaussianMixture {
  std::vector<GaussianComponent> components;
  double baseline = 0.0;
};

/// Piecewise-constant values on a regular grid over [lower, upper], stored
/// row-major with x varying fastest.
struct GridDensity {
  int nx = 1;
  int ny = 1;
  Point lower = Point::Zero();
  Point upper = Point::Ones();
  std::vector<double> values;
};

class DensityField {
 public:
  using Variant = std::variant<UniformDensity, GaussianMixture, GridDensity>;

  DensityField() : field_(UniformDensity{}) {}
  /// Throws invalid-input on non-positive weights, variances or grid values.
  explicit DensityField(Variant field);

  const Variant& variant() const { return field_; }
  bool is_uniform() const { return std::holds_alternative<UniformDensity>(field_); }

  double operator()(const Point& q) const;

 private:
  Variant field_;
};

struct QuadratureOptions {
  /// Triangle rule degree: 1, 2 or 5.
  int order = 5;
  /// Refinement stops once successive estimates agree to this (absolute for
  /// unit-scale values, relative above one).
  double tolerance = 1e-7;
  int max_level = 8;
};

/// Integrals of phi, q phi and |q - about|^2 phi over one polygon.
struct CellMoments {
  double mass = 0.0;
  Point first = Point::Zero();
  double second = 0.0;
};

/// Uniform and grid densities are integrated exactly; Gaussian mixtures use
/// fan triangulation with refinement.
CellMoments integrate_cell(const Polygon& cell, const DensityField& density,
                           const Point& about, const QuadratureOptions& options = {});

}  // namespace rigcov
