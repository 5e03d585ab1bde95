//
// Copyright 2026 The motifdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "motifdp/graph.hpp"

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "motifdp/error.hpp"

namespace motifdp {
namespace {

SparseWeightedGraph cycle3() {
  const std::vector<Edge> e = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
  return SparseWeightedGraph::from_edges(3, e);
}

SparseWeightedGraph complete4() {
  SparseWeightedGraph g(4);
  for (NodeId i = 0; i < 4; ++i)
    for (NodeId j = i + 1; j < 4; ++j) g.add_edge(i, j, 1.0);
  return g;
}

SparseWeightedGraph random_graph(std::size_t n, double p, std::mt19937_64& rng, bool unit = false) {
  std::bernoulli_distribution keep(p);
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  SparseWeightedGraph g(n);
  for (NodeId i = 0; i < static_cast<NodeId>(n); ++i)
    for (NodeId j = i + 1; j < static_cast<NodeId>(n); ++j)
      if (keep(rng)) g.add_edge(i, j, unit ? 1.0 : weight(rng));
  return g;
}

Matrix random_features(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
  return x;
}

TEST(SparseWeightedGraphTest, RejectsInvalidEdges) {
  SparseWeightedGraph g(3);
  EXPECT_THROW(g.add_edge(0, 0, 0.5), InvalidArgument);
  EXPECT_THROW(g.add_edge(0, 3, 0.5), InvalidArgument);
  EXPECT_THROW(g.add_edge(0, 1, 0.0), InvalidArgument);
  EXPECT_THROW(g.add_edge(0, 1, 1.5), InvalidArgument);
  g.add_edge(0, 1, 0.5);
  EXPECT_THROW(g.add_edge(1, 0, 0.5), InvalidArgument);
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_DOUBLE_EQ(g.weight(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.weight(1, 2), 0.0);
}

TEST(SparseWeightedGraphTest, EdgesAreListedOnceInOrder) {
  SparseWeightedGraph g(4);
  g.add_edge(2, 3, 0.1);
  g.add_edge(1, 0, 0.2);
  g.add_edge(0, 3, 0.3);
  const auto e = g.edges();
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(std::pair(e[0].i, e[0].j), std::pair(0, 1));
  EXPECT_EQ(std::pair(e[1].i, e[1].j), std::pair(0, 3));
  EXPECT_EQ(std::pair(e[2].i, e[2].j), std::pair(2, 3));
}

TEST(CosineSimilarityTest, IdenticalRowsGiveOne) {
  Matrix x(2, 3);
  x << 1, 2, 3, 1, 2, 3;
  EXPECT_DOUBLE_EQ(cosine_similarity(x)(0, 1), 1.0);
}

TEST(CosineSimilarityTest, OrthogonalRowsGiveZero) {
  Matrix x(2, 2);
  x << 1, 0, 0, 1;
  EXPECT_DOUBLE_EQ(cosine_similarity(x)(0, 1), 0.0);
}

TEST(CosineSimilarityTest, HandComputedAngle) {
  Matrix x(2, 2);
  x << 1, 0, 1, 1;
  EXPECT_NEAR(cosine_similarity(x)(0, 1), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(CosineSimilarityTest, SymmetricWithUnitDiagonal) {
  std::mt19937_64 rng(3);
  const Matrix s = cosine_similarity(random_features(20, 5, rng));
  for (Eigen::Index i = 0; i < 20; ++i) {
    EXPECT_EQ(s(i, i), 1.0);
    for (Eigen::Index j = 0; j < 20; ++j) {
      EXPECT_EQ(s(i, j), s(j, i));
      EXPECT_LE(std::fabs(s(i, j)), 1.0);
    }
  }
}

TEST(CosineSimilarityTest, ZeroRowIsNamed) {
  Matrix x(3, 2);
  x << 1, 0, 0, 0, 0, 1;
  try {
    cosine_similarity(x);
    FAIL() << "expected rejection";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
}

TEST(BuildClippedGraphTest, OrthogonalTieBreakKeepsOnlyFirstPair) {
  const Matrix x = Matrix::Identity(3, 3);
  const auto lists = candidate_lists(cosine_similarity(x), 1, -1.0);
  EXPECT_EQ(lists[0], std::vector<NodeId>{1});
  EXPECT_EQ(lists[1], std::vector<NodeId>{0});
  EXPECT_EQ(lists[2], std::vector<NodeId>{0});
  const auto pairs = and_symmetrize(lists);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], std::pair(0, 1));
  // The surviving pair has similarity 0, which maps to weight 0 and is not
  // stored.
  EXPECT_EQ(build_clipped_graph(x, 1, -1.0).graph.n_edges(), 0u);
}

TEST(BuildClippedGraphTest, WeightsAreClampedSimilarities) {
  Matrix x(3, 2);
  x << 1, 0, 1, 1, 0, 1;
  const ClippedGraph g = build_clipped_graph(x, 2);
  EXPECT_NEAR(g.graph.weight(0, 1), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(g.graph.weight(1, 2), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_FALSE(g.graph.has_edge(0, 2));  // similarity 0 is not above w_floor
}

TEST(BuildClippedGraphTest, RejectsVacuousDmax) {
  std::mt19937_64 rng(1);
  const Matrix x = random_features(5, 3, rng);
  EXPECT_THROW(build_clipped_graph(x, 5), InvalidArgument);
  EXPECT_THROW(build_clipped_graph(x, 0), InvalidArgument);
  EXPECT_NO_THROW(build_clipped_graph(x, 4));
}

TEST(BuildClippedGraphTest, DegreeBoundHoldsOnRandomInputs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = std::uniform_int_distribution<Eigen::Index>(2, 40)(rng);
    const auto d = std::uniform_int_distribution<Eigen::Index>(1, 6)(rng);
    const int d_max = std::uniform_int_distribution<int>(1, static_cast<int>(n) - 1)(rng);
    const double w_floor = std::uniform_real_distribution<double>(-1.0, 0.5)(rng);
    const ClippedGraph g = build_clipped_graph(random_features(n, d, rng), d_max, w_floor);
    EXPECT_LE(g.max_degree(), static_cast<std::size_t>(d_max));
  }
}

TEST(BuildClippedGraphTest, AndEdgesAreSubsetOfOrEdges) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto lists = candidate_lists(cosine_similarity(random_features(25, 4, rng)), 4, 0.0);
    const auto and_pairs = and_symmetrize(lists);
    const auto or_pairs = or_symmetrize(lists);
    const std::set<std::pair<NodeId, NodeId>> or_set(or_pairs.begin(), or_pairs.end());
    for (const auto& p : and_pairs) EXPECT_TRUE(or_set.count(p));
  }
}

TEST(BuildClippedGraphTest, Deterministic) {
  std::mt19937_64 rng(9);
  const Matrix x = random_features(60, 8, rng);
  EXPECT_EQ(build_clipped_graph(x, 7).graph, build_clipped_graph(x, 7).graph);
}

TEST(TriangleStatsTest, EmptyGraph) {
  const TriangleStats s = triangle_stats(SparseWeightedGraph(5));
  EXPECT_TRUE(s.per_edge.empty());
  EXPECT_EQ(s.total, 0.0);
  EXPECT_EQ(s.triangles, 0u);
}

TEST(TriangleStatsTest, UnitTriangle) {
  const TriangleStats s = triangle_stats(cycle3());
  ASSERT_EQ(s.per_edge.size(), 3u);
  for (const auto& m : s.per_edge) EXPECT_EQ(m.tau, 1.0);
  EXPECT_EQ(s.triangles, 1u);
  EXPECT_DOUBLE_EQ(s.total, 1.0);
}

TEST(TriangleStatsTest, UnitK4) {
  const TriangleStats s = triangle_stats(complete4());
  ASSERT_EQ(s.per_edge.size(), 6u);
  for (const auto& m : s.per_edge) EXPECT_EQ(m.tau, 2.0);
  EXPECT_EQ(s.triangles, 4u);
}

TEST(TriangleStatsTest, PathHasNoTriangles) {
  const std::vector<Edge> e = {{0, 1, 1.0}, {1, 2, 1.0}};
  const auto g = SparseWeightedGraph::from_edges(3, e);
  for (const auto& s : {triangle_stats(g), triangle_stats_bruteforce(g)}) {
    for (const auto& m : s.per_edge) EXPECT_EQ(m.tau, 0.0);
    EXPECT_EQ(s.triangles, 0u);
  }
}

TEST(TriangleStatsTest, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(3, 30)(rng);
    const auto g = random_graph(n, 0.3, rng);
    const TriangleStats fast = triangle_stats(g);
    const TriangleStats slow = triangle_stats_bruteforce(g);
    ASSERT_EQ(fast.per_edge.size(), slow.per_edge.size());
    EXPECT_EQ(fast.triangles, slow.triangles);
    for (std::size_t e = 0; e < fast.per_edge.size(); ++e) {
      EXPECT_EQ(fast.per_edge[e].common, slow.per_edge[e].common);
      EXPECT_NEAR(fast.per_edge[e].tau, slow.per_edge[e].tau, 1e-12 * std::max(1.0, slow.per_edge[e].tau));
    }
    EXPECT_NEAR(fast.total, slow.total, 1e-12 * std::max(1.0, slow.total));
  }
}

TEST(TriangleStatsTest, BruteForceGuard) {
  EXPECT_THROW(triangle_stats_bruteforce(SparseWeightedGraph(kBruteForceNodeLimit + 1)), InvalidArgument);
  EXPECT_NO_THROW(triangle_stats_bruteforce(SparseWeightedGraph(kBruteForceNodeLimit)));
}

TEST(TriangleStatsTest, AddingAnEdgeNeverLowersTotal) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<NodeId> node(0, 19);
  auto g = random_graph(20, 0.2, rng);
  double prev = triangle_stats(g).total;
  for (int step = 0; step < 60; ++step) {
    const NodeId a = node(rng), b = node(rng);
    if (a == b || g.has_edge(a, b)) continue;
    g.add_edge(a, b, 0.5);
    const double now = triangle_stats(g).total;
    EXPECT_GE(now, prev);
    prev = now;
  }
}

TEST(DegreeStatsTest, HandCounts) {
  const DegreeStats empty = degree_stats(SparseWeightedGraph(4));
  EXPECT_EQ(empty.max_degree, 0u);
  EXPECT_EQ(empty.mean_degree, 0.0);
  EXPECT_EQ(empty.total_weight, 0.0);

  const DegreeStats c3 = degree_stats(cycle3());
  EXPECT_EQ(c3.max_degree, 2u);
  EXPECT_DOUBLE_EQ(c3.mean_degree, 2.0);
  EXPECT_DOUBLE_EQ(c3.total_weight, 3.0);

  const DegreeStats k4 = degree_stats(complete4());
  EXPECT_EQ(k4.max_degree, 3u);
  EXPECT_DOUBLE_EQ(k4.mean_degree, 3.0);
  EXPECT_DOUBLE_EQ(k4.total_weight, 6.0);
}

}  // namespace
}  // namespace motifdp
