#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/SVD>

#include "rigcov/bearing.h"
#include "rigcov/error.h"
#include "rigcov/rng.h"

namespace rigcov {
namespace {

Framework make(const Graph& g, const std::vector<Eigen::Vector2d>& pts) {
  std::vector<Eigen::VectorXd> v(pts.begin(), pts.end());
  return Framework(g, Configuration(2, v));
}

Framework random_framework(const Graph& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < g.num_vertices(); ++i) pts.push_back(Eigen::Vector2d(rng.uniform(), rng.uniform()));
  return Framework(g, Configuration(2, pts));
}

TEST(Bearing, UnitBearings) {
  const Framework fw = make(Graph(2, {{0, 1}}), {{0, 0}, {3, 4}});
  const BearingVector b = bearing_function(fw);
  ASSERT_EQ(b.bearings.size(), 1u);
  EXPECT_NEAR(b.bearings[0](0), 0.6, 1e-15);
  EXPECT_NEAR(b.bearings[0](1), 0.8, 1e-15);
  const Eigen::VectorXd back = bearing(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0));
  EXPECT_DOUBLE_EQ(back(0), -1.0);
  EXPECT_THROW(make(Graph(2, {{0, 1}}), {{1, 1}, {1, 1}}), Error);
}

TEST(Bearing, TwoPointMatrix) {
  const Eigen::MatrixXd R = rigidity_matrix(make(Graph(2, {{0, 1}}), {{0, 0}, {1, 0}}));
  Eigen::MatrixXd expected(2, 4);
  expected << 0, 0, 0, 0, 0, -1, 0, 1;
  EXPECT_LT((R - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Bearing, MatrixMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Framework fw = random_framework(henneberg_generate(6, seed, 0.5).graph, seed + 100);
    const Eigen::MatrixXd R = rigidity_matrix(fw);
    const double h = 1e-6;
    for (Eigen::Index c = 0; c < fw.config().stacked().size(); ++c) {
      Eigen::VectorXd plus = fw.config().stacked(), minus = plus;
      plus(c) += h;
      minus(c) -= h;
      const Eigen::VectorXd fp = bearing_function(Framework(fw.graph(), Configuration(2, plus))).stacked();
      const Eigen::VectorXd fm = bearing_function(Framework(fw.graph(), Configuration(2, minus))).stacked();
      const Eigen::VectorXd col = (fp - fm) / (2 * h);
      EXPECT_LT((R.col(c) - col).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(Bearing, TrivialMotionsInNullSpace) {
  const Framework fw = random_framework(henneberg_generate(7, 3, 0.5).graph, 9);
  const Eigen::MatrixXd R = rigidity_matrix(fw);
  const Eigen::MatrixXd T = trivial_motions(fw.config());
  ASSERT_EQ(T.cols(), 3);
  for (Eigen::Index c = 0; c < T.cols(); ++c) {
    EXPECT_LE((R * T.col(c)).norm(), 1e-9 * T.col(c).norm());
  }
}

TEST(Bearing, RankExamples) {
  EXPECT_EQ(rigidity_rank(make(Graph(2, {{0, 1}}), {{0, 0}, {1, 0}})).rank, 1);
  const Graph k3(3, {{0, 1}, {0, 2}, {1, 2}});
  const RigidityRank tri = rigidity_rank(make(k3, {{0, 0}, {1, 0}, {0, 1}}));
  EXPECT_EQ(tri.rank, 3);
  EXPECT_EQ(tri.bound, 3);
  EXPECT_LT(rigidity_rank(make(Graph(3, {{0, 1}, {1, 2}}), {{0, 0}, {1, 0}, {2, 0}})).rank, 3);
}

TEST(Bearing, RankAgreesWithIndependentSvd) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Framework fw = random_framework(henneberg_generate(8, seed, 0.5).graph, seed);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rigidity_matrix(fw));
    const Eigen::VectorXd s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) rank += s(k) > 1e-8 * s(0);
    EXPECT_EQ(rigidity_rank(fw).rank, rank);
    EXPECT_EQ(rank, 2 * 8 - 3);
    EXPECT_TRUE(is_infinitesimally_bearing_rigid(fw));
  }
}

TEST(Bearing, ThreeDimensions) {
  Rng rng(4);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 4; ++i) pts.push_back(Eigen::Vector3d(rng.uniform(), rng.uniform(), rng.uniform()));
  const Framework fw(Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}), Configuration(3, pts));
  EXPECT_EQ(rigidity_rank(fw).bound, 3 * 4 - 3 - 1);
  EXPECT_TRUE(is_infinitesimally_bearing_rigid(fw));
}

}  // namespace
}  // namespace rigcov
