#pragma once

#include <vector>

#include "rigcov/density.h"
#include "rigcov/geometry.h"

namespace rigcov {

inline constexpr double kMinSiteSeparation = 1e-7;
inline constexpr double kConvergedError = 1e-6;

struct VoronoiPartition {
  /// One cell per site, same order as the input positions.
  std::vector<Polygon> cells;
  /// Sites actually used; positions outside the region are projected onto it.
  std::vector<Point> sites;
  /// Indices of positions that had to be projected.
  std::vector<int> clamped;
};

/// Each cell is the region clipped by the n - 1 bisector half-planes. Throws
/// degenerate-sites if two positions are closer than kMinSiteSeparation.
/// Projected sites are reported on stderr when `warn` is set.
VoronoiPartition voronoi_partition(const std::vector<Point>& positions,
                                   const ConvexRegion& region, bool warn = true);

/// Density-weighted centroid. Throws degenerate-mass if the cell mass is
/// below 1e-12.
Point centroid(const Polygon& cell, const DensityField& density,
               const QuadratureOptions& options = {});

std::vector<Point> centroids(const VoronoiPartition& partition, const DensityField& density,
                             const QuadratureOptions& options = {});

/// Locational cost H = sum_i int_{W_i} |q - p_i|^2 phi(q) dq.
double coverage_cost(const std::vector<Point>& positions, const VoronoiPartition& partition,
                     const DensityField& density, const QuadratureOptions& options = {});

/// Convenience: partition then cost.
double coverage_cost(const std::vector<Point>& positions, const ConvexRegion& region,
                     const DensityField& density, const QuadratureOptions& options = {});

/// One Lloyd iteration: the centroids of the Voronoi cells of `positions`.
std::vector<Point> lloyd_step(const std::vector<Point>& positions, const ConvexRegion& region,
                              const DensityField& density, const QuadratureOptions& options = {});

/// Tracking errors |p_i - r_i| recorded at the last partition update.
struct TrackingErrors {
  std::vector<double> e;
};

TrackingErrors tracking_errors(const std::vector<Point>& positions,
                               const std::vector<Point>& references);

/// True iff no robot is further from its reference than at the last update
/// and either one is strictly closer or all stored errors are converged.
bool partition_update_due(const std::vector<Point>& positions,
                          const std::vector<Point>& references, const TrackingErrors& errors);

}  // namespace rigcov
