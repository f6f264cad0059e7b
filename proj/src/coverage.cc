#include "rigcov/coverage.h"

#include <iostream>
#include <string>

#include "rigcov/error.h"

namespace rigcov {

VoronoiPartition voronoi_partition(const std::vector<Point>& positions,
                                   const ConvexRegion& region, bool warn) {
  const std::size_t n = positions.size();
  if (n == 0) throw Error(ErrorKind::kInvalidInput, "no sites");
  VoronoiPartition out;
  out.sites.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!positions[i].allFinite()) {
      throw Error(ErrorKind::kInvalidInput, "non-finite site " + std::to_string(i));
    }
    if (region.contains(positions[i])) {
      out.sites.push_back(positions[i]);
    } else {
      out.sites.push_back(region.project(positions[i]));
      out.clamped.push_back(static_cast<int>(i));
      if (warn) std::cerr << "warning: site " << i << " outside the region, projected onto it\n";
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((out.sites[i] - out.sites[j]).norm() < kMinSiteSeparation) {
        throw Error(ErrorKind::kDegenerateSites,
                    "sites " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
  out.cells.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Polygon cell = region.vertices();
    const Point& pi = out.sites[i];
    for (std::size_t j = 0; j < n && !cell.empty(); ++j) {
      if (j == i) continue;
      const Point& pj = out.sites[j];
      // |q - p_i| <= |q - p_j|  <=>  (p_j - p_i) . q <= (|p_j|^2 - |p_i|^2) / 2
      cell = clip_halfplane(cell, pj - pi, 0.5 * (pj.squaredNorm() - pi.squaredNorm()));
    }
    out.cells.push_back(std::move(cell));
  }
  return out;
}

Point centroid(const Polygon& cell, const DensityField& density,
               const QuadratureOptions& options) {
  if (cell.size() < 3) throw Error(ErrorKind::kDegenerateMass, "empty cell");
  if (density.is_uniform()) return polygon_centroid(cell);
  const CellMoments m = integrate_cell(cell, density, cell.front(), options);
  if (m.mass < 1e-12) throw Error(ErrorKind::kDegenerateMass, "cell mass below 1e-12");
  return m.first / m.mass;
}

std::vector<Point> centroids(const VoronoiPartition& partition, const DensityField& density,
                             const QuadratureOptions& options) {
  std::vector<Point> out;
  out.reserve(partition.cells.size());
  for (const Polygon& cell : partition.cells) out.push_back(centroid(cell, density, options));
  return out;
}

double coverage_cost(const std::vector<Point>& positions, const VoronoiPartition& partition,
                     const DensityField& density, const QuadratureOptions& options) {
  if (positions.size() != partition.cells.size()) {
    throw Error(ErrorKind::kInvalidInput, "partition does not match positions");
  }
  double h = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    h += integrate_cell(partition.cells[i], density, positions[i], options).second;
  }
  return h;
}

double coverage_cost(const std::vector<Point>& positions, const ConvexRegion& region,
                     const DensityField& density, const QuadratureOptions& options) {
  return coverage_cost(positions, voronoi_partition(positions, region), density, options);
}

std::vector<Point> lloyd_step(const std::vector<Point>& positions, const ConvexRegion& region,
                              const DensityField& density, const QuadratureOptions& options) {
  return centroids(voronoi_partition(positions, region), density, options);
}

TrackingErrors tracking_errors(const std::vector<Point>& positions,
                               const std::vector<Point>& references) {
  if (positions.size() != references.size()) {
    throw Error(ErrorKind::kInvalidInput, "positions and references differ in length");
  }
  TrackingErrors out;
  out.e.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out.e.push_back((positions[i] - references[i]).norm());
  }
  return out;
}

bool partition_update_due(const std::vector<Point>& positions,
                          const std::vector<Point>& references, const TrackingErrors& errors) {
  const std::size_t n = positions.size();
  if (references.size() != n || errors.e.size() != n) {
    throw Error(ErrorKind::kInvalidInput, "partition_update_due: length mismatch");
  }
  bool some_strict = false;
  bool all_converged = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double now = (positions[i] - references[i]).norm();
    if (now > errors.e[i]) return false;
    if (now < errors.e[i]) some_strict = true;
    if (errors.e[i] > kConvergedError) all_converged = false;
  }
  return some_strict || all_converged;
}

}  // namespace rigcov
