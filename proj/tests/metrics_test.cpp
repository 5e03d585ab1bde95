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

#include "motifdp/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "motifdp/error.hpp"
#include "motifdp/hashing.hpp"

namespace motifdp {
namespace {

CodeMatrix codes_from(std::vector<std::vector<int>> rows) {
  CodeMatrix c;
  c.rows = rows.size();
  c.k = rows.front().size();
  for (const auto& r : rows)
    for (int b : r) c.bits.push_back(static_cast<std::int8_t>(b));
  return c;
}

CodeMatrix random_codes(std::size_t rows, std::size_t k, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  CodeMatrix c;
  c.rows = rows;
  c.k = k;
  for (std::size_t i = 0; i < rows * k; ++i) c.bits.push_back(coin(rng) ? 1 : -1);
  return c;
}

TEST(HammingRankTest, HandComputedOrder) {
  const CodeMatrix db = codes_from({{1, 1, 1, 1}, {-1, -1, 1, 1}, {-1, 1, 1, 1}});
  const std::vector<std::int8_t> q = {1, 1, 1, 1};
  EXPECT_EQ(hamming_rank(q, db), (std::vector<std::size_t>{0, 2, 1}));
}

TEST(HammingRankTest, ExactMatchFirstAndTiesByIndex) {
  const CodeMatrix db = codes_from({{1, -1}, {-1, 1}, {1, 1}, {-1, -1}});
  EXPECT_EQ(hamming_rank(std::vector<std::int8_t>{1, 1}, db), (std::vector<std::size_t>{2, 0, 1, 3}));
  EXPECT_EQ(hamming_rank(std::vector<std::int8_t>{-1, 1}, db).front(), 1u);
  EXPECT_THROW(hamming_rank(std::vector<std::int8_t>{1}, db), InvalidArgument);
}

TEST(AveragePrecisionTest, ReferenceValues) {
  EXPECT_NEAR(average_precision(std::vector<std::uint8_t>{1, 0, 1}, 3), 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(average_precision(std::vector<std::uint8_t>{1, 0, 1}, 3), 0.83333, 1e-5);
  EXPECT_EQ(average_precision(std::vector<std::uint8_t>{1, 1, 1, 1}, 2), 1.0);
  EXPECT_EQ(average_precision(std::vector<std::uint8_t>{0, 0, 0}, 3), 0.0);
  EXPECT_THROW(average_precision(std::vector<std::uint8_t>{1}, 0), InvalidArgument);
}

TEST(AveragePrecisionTest, InvariantBeyondCutoff) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint8_t> flags(30);
    for (auto& f : flags) f = coin(rng);
    const double before = average_precision(flags, 10);
    std::shuffle(flags.begin() + 10, flags.end(), rng);
    EXPECT_EQ(average_precision(flags, 10), before);
  }
}

// Independent reimplementation: full distance sort, then AP by definition.
double brute_force_map(const CodeMatrix& q, const CodeMatrix& db,
                       const std::function<bool(std::size_t, std::size_t)>& rel, std::size_t k) {
  double total = 0.0;
  for (std::size_t a = 0; a < q.rows; ++a) {
    std::vector<std::pair<int, std::size_t>> order;
    for (std::size_t b = 0; b < db.rows; ++b) {
      int d = 0;
      for (std::size_t bit = 0; bit < q.k; ++bit) d += q.at(a, bit) != db.at(b, bit);
      order.emplace_back(d, b);
    }
    std::sort(order.begin(), order.end());
    std::size_t relevant = 0;
    for (std::size_t b = 0; b < db.rows; ++b) relevant += rel(a, b);
    if (relevant == 0) continue;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < std::min(k, order.size()); ++r) {
      if (!rel(a, order[r].second)) continue;
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
    total += sum / static_cast<double>(std::min(k, relevant));
  }
  return total / static_cast<double>(q.rows);
}

TEST(MapAtKTest, MatchesBruteForce) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k_bits = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
    const CodeMatrix q = random_codes(7, k_bits, rng);
    const CodeMatrix db = random_codes(40, k_bits, rng);
    std::uniform_int_distribution<int> label(0, 3);
    std::vector<std::vector<int>> ql(7), dl(40);
    for (auto& l : ql) l = {label(rng)};
    for (auto& l : dl) l = {label(rng)};
    const auto rel = shared_label_relevance(ql, dl);
    const std::size_t cutoff = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
    EXPECT_EQ(map_at_k({Direction::kImageToText, q, db, rel, cutoff}),
              brute_force_map(q, db, rel, cutoff));
  }
}

TEST(MapAtKTest, SingleQueryEqualsItsAp) {
  const CodeMatrix db = codes_from({{1, 1, 1, 1}, {-1, -1, 1, 1}, {-1, 1, 1, 1}});
  const CodeMatrix q = codes_from({{1, 1, 1, 1}});
  // Ranking is (0, 2, 1); items 0 and 1 are relevant.
  const auto rel = [](std::size_t, std::size_t b) { return b != 2; };
  EXPECT_NEAR(map_at_k({Direction::kImageToText, q, db, rel, 3}), 5.0 / 6.0, 1e-15);
}

TEST(MapAtKTest, InvariantUnderBitPermutation) {
  std::mt19937_64 rng(12);
  const CodeMatrix q = random_codes(10, 16, rng);
  const CodeMatrix db = random_codes(60, 16, rng);
  const auto rel = [](std::size_t a, std::size_t b) { return (a + b) % 3 == 0; };
  std::vector<std::size_t> perm(16);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  auto permute = [&](const CodeMatrix& c) {
    CodeMatrix out = c;
    for (std::size_t i = 0; i < c.rows; ++i)
      for (std::size_t b = 0; b < c.k; ++b) out.bits[i * c.k + b] = c.at(i, perm[b]);
    return out;
  };
  EXPECT_EQ(map_at_k({Direction::kTextToImage, q, db, rel, 20}),
            map_at_k({Direction::kTextToImage, permute(q), permute(db), rel, 20}));
}

TEST(MapAtKTest, Rejections) {
  std::mt19937_64 rng(1);
  const auto rel = [](std::size_t, std::size_t) { return true; };
  EXPECT_THROW(map_at_k({Direction::kImageToText, CodeMatrix{0, 4, {}}, random_codes(3, 4, rng), rel, 5}),
               InvalidArgument);
  EXPECT_THROW(map_at_k({Direction::kImageToText, random_codes(2, 4, rng), random_codes(3, 8, rng), rel, 5}),
               InvalidArgument);
}

TEST(SharedLabelRelevanceTest, SetIntersection) {
  const auto rel = shared_label_relevance({{1, 3}, {2}}, {{0, 3}, {4}, {1, 2}});
  EXPECT_TRUE(rel(0, 0));
  EXPECT_FALSE(rel(0, 1));
  EXPECT_TRUE(rel(0, 2));
  EXPECT_FALSE(rel(1, 0));
  EXPECT_TRUE(rel(1, 2));
}

TEST(TriangleCountErrorTest, FormulaCases) {
  EXPECT_EQ(triangle_count_error(2, 4).tce, 0.5);
  EXPECT_EQ(triangle_count_error(3, 0).tce, 3.0);
  EXPECT_EQ(triangle_count_error(0, 0).tce, 0.0);
  EXPECT_EQ(triangle_count_error(7, 7).tce, 0.0);
}

TEST(TriangleCountErrorTest, ZeroWhenReferenceIsTheInducedGraph) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const CodeMatrix c = random_codes(30, 8, rng);
    const SparseWeightedGraph reference = hamming_knn_graph(c, 4).graph;
    EXPECT_EQ(triangle_count_error(c, reference, 4).tce, 0.0);
  }
}

TEST(TriangleCountErrorTest, SizeMismatchRejected) {
  std::mt19937_64 rng(2);
  EXPECT_THROW(triangle_count_error(random_codes(5, 4, rng), SparseWeightedGraph(6), 2),
               InvalidArgument);
}

TEST(HammingKnnGraphTest, DegreeBoundAndIdenticalCodeCliques) {
  // Four identical codes and two others: every node ranks the identical
  // group first, so the group forms a clique.
  const CodeMatrix c = codes_from({{1, 1, 1}, {1, 1, 1}, {-1, -1, -1}, {1, 1, 1}, {1, 1, 1}, {-1, -1, 1}});
  const ClippedGraph g = hamming_knn_graph(c, 3);
  EXPECT_LE(g.max_degree(), 3u);
  for (NodeId a : {0, 1, 3, 4})
    for (NodeId b : {0, 1, 3, 4})
      if (a != b) {
        EXPECT_TRUE(g.graph.has_edge(a, b));
      }
  EXPECT_TRUE(g.graph.has_edge(2, 5));
}

}  // namespace
}  // namespace motifdp
