#include <gtest/gtest.h>

#include <cmath>

#include "rigcov/coverage.h"
#include "rigcov/error.h"
#include "rigcov/rng.h"

namespace rigcov {
namespace {

std::vector<Point> random_points(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.emplace_back(rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98));
  return p;
}

DensityField bump() {
  GaussianMixture g;
  g.components.push_back({Point(0.7, 0.7), Point(0.04, 0.04), 1.0});
  return DensityField(g);
}

// Midpoint sum on an m x m grid over the unit square, points assigned to the
// nearest site.
struct GridOracle {
  double mass = 0.0;
  Point first = Point::Zero();
  double cost = 0.0;
};

GridOracle grid_oracle(const std::vector<Point>& sites, const DensityField& phi, int m) {
  GridOracle o;
  const double h = 1.0 / m;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Point q((a + 0.5) * h, (b + 0.5) * h);
      double best = 1e300;
      for (const Point& s : sites) best = std::min(best, (q - s).squaredNorm());
      const double w = phi(q) * h * h;
      o.mass += w;
      o.first += w * q;
      o.cost += w * best;
    }
  }
  return o;
}

TEST(Geometry, PolygonBasics) {
  const Polygon tri{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_DOUBLE_EQ(signed_area(tri), 0.5);
  EXPECT_NEAR(polygon_centroid(tri).x(), 1.0 / 3, 1e-15);
  EXPECT_NEAR(polygon_centroid(tri).y(), 1.0 / 3, 1e-15);
  const ConvexRegion sq = ConvexRegion::unit_square();
  EXPECT_NEAR(polygon_second_moment(sq.vertices(), Point(0.5, 0.5)), 1.0 / 6, 1e-15);
  EXPECT_TRUE(sq.contains(Point(0.5, 0.5)));
  EXPECT_FALSE(sq.contains(Point(1.5, 0.5)));
  EXPECT_LT((sq.project(Point(1.5, 2.0)) - Point(1, 1)).norm(), 1e-15);
  EXPECT_NEAR(sq.shrunk(0.1).area(), 0.64, 1e-14);
  EXPECT_THROW(ConvexRegion(Polygon{{0, 0}, {0, 1}, {1, 0}}), Error);
  EXPECT_THROW(sq.shrunk(0.6), Error);
}

TEST(Voronoi, Examples) {
  const ConvexRegion sq = ConvexRegion::unit_square();
  const VoronoiPartition one = voronoi_partition({Point(0.3, 0.3)}, sq);
  EXPECT_NEAR(signed_area(one.cells[0]), 1.0, 1e-15);

  const VoronoiPartition two = voronoi_partition({Point(0.25, 0.5), Point(0.75, 0.5)}, sq);
  for (const Point& v : two.cells[0]) EXPECT_LE(v.x(), 0.5 + 1e-15);
  for (const Point& v : two.cells[1]) EXPECT_GE(v.x(), 0.5 - 1e-15);
  EXPECT_NEAR(signed_area(two.cells[0]), 0.5, 1e-15);

  EXPECT_THROW(voronoi_partition({Point(0.5, 0.5), Point(0.5, 0.5)}, sq), Error);
  const VoronoiPartition out = voronoi_partition({Point(1.5, 0.5), Point(0.2, 0.5)}, sq, false);
  EXPECT_EQ(out.clamped, std::vector<int>{0});
}

TEST(Voronoi, CellsTileTheRegion) {
  const ConvexRegion sq = ConvexRegion::unit_square();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 2 + static_cast<int>(seed % 11);
    const std::vector<Point> p = random_points(n, seed);
    const VoronoiPartition part = voronoi_partition(p, sq);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += signed_area(part.cells[i]);
      EXPECT_TRUE(point_in_convex(part.cells[i], p[i], 1e-12));
    }
    EXPECT_NEAR(total, 1.0, 1e-8);
  }
}

TEST(Centroid, UniformAndGaussian) {
  const ConvexRegion sq = ConvexRegion::unit_square();
  const Point c = centroid(sq.vertices(), DensityField{});
  EXPECT_LT((c - Point(0.5, 0.5)).norm(), 1e-15);

  GaussianMixture g;
  g.components.push_back({Point(0.7, 0.7), Point(0.04, 0.04), 1.0});
  const DensityField phi(g);
  const Point cg = centroid(sq.vertices(), phi);
  const GridOracle o = grid_oracle({Point(0.5, 0.5)}, phi, 400);
  EXPECT_NEAR(cg.x(), o.first.x() / o.mass, 1e-4);
  EXPECT_NEAR(cg.y(), o.first.y() / o.mass, 1e-4);
}

TEST(Centroid, GridDensityIsExact) {
  GridDensity grid;
  grid.nx = 2;
  grid.ny = 1;
  grid.values = {1.0, 3.0};
  const ConvexRegion sq = ConvexRegion::unit_square();
  // mass 0.5 + 1.5, x-moment 0.5*0.25 + 1.5*0.75
  const Point c = centroid(sq.vertices(), DensityField(grid));
  EXPECT_NEAR(c.x(), (0.125 + 1.125) / 2.0, 1e-14);
  EXPECT_NEAR(c.y(), 0.5, 1e-14);
}

TEST(CoverageCost, Examples) {
  const ConvexRegion sq = ConvexRegion::unit_square();
  const double h0 = coverage_cost({Point(0.5, 0.5)}, sq, DensityField{});
  EXPECT_NEAR(h0, 1.0 / 6, 1e-14);
  EXPECT_GT(coverage_cost({Point(0.6, 0.5)}, sq, DensityField{}), h0);

  const std::vector<Point> p = random_points(5, 3);
  const GridOracle o = grid_oracle(p, bump(), 400);
  EXPECT_NEAR(coverage_cost(p, sq, bump()), o.cost, 1e-5);
}

TEST(CoverageCost, LloydIsMonotone) {
  const ConvexRegion sq = ConvexRegion::unit_square();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::vector<Point> p = random_points(6, seed + 50);
    double h = coverage_cost(p, sq, DensityField{});
    for (int it = 0; it < 200; ++it) {
      const std::vector<Point> q = lloyd_step(p, sq, DensityField{});
      const double hq = coverage_cost(q, sq, DensityField{});
      EXPECT_LE(hq, h + 1e-10);
      double moved = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) moved = std::max(moved, (q[i] - p[i]).norm());
      p = q;
      h = hq;
      if (moved < 1e-6) break;
    }
    const VoronoiPartition part = voronoi_partition(p, sq);
    const std::vector<Point> c = centroids(part, DensityField{});
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_TRUE(point_in_convex(part.cells[i], c[i]));
  }
}

TEST(PartitionUpdate, Criterion) {
  const std::vector<Point> r{Point(0.2, 0.2), Point(0.8, 0.8)};
  EXPECT_TRUE(partition_update_due(r, r, tracking_errors(r, r)));

  const std::vector<Point> p0{Point(0.3, 0.2), Point(0.8, 0.6)};
  const TrackingErrors e = tracking_errors(p0, r);
  EXPECT_NEAR(e.e[1], 0.2, 1e-15);
  const std::vector<Point> worse{Point(0.25, 0.2), Point(0.8, 0.5)};
  EXPECT_FALSE(partition_update_due(worse, r, e));
  const std::vector<Point> better{Point(0.25, 0.2), Point(0.8, 0.7)};
  EXPECT_TRUE(partition_update_due(better, r, e));
  EXPECT_FALSE(partition_update_due(p0, r, e));
}

}  // namespace
}  // namespace rigcov
