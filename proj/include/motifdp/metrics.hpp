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

#ifndef MOTIFDP_METRICS_HPP_
#define MOTIFDP_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "motifdp/error.hpp"
#include "motifdp/graph.hpp"
#include "motifdp/hashing.hpp"

namespace motifdp {

enum class Direction { kImageToText, kTextToImage };

inline int hamming_distance(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  require(a.size() == b.size(), "hamming_distance: code lengths differ");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Database indices by ascending Hamming distance, ties by ascending index.
inline std::vector<std::size_t> hamming_rank(std::span<const std::int8_t> query,
                                             const CodeMatrix& db) {
  require(query.size() == db.k, "hamming_rank: query has " + std::to_string(query.size()) +
                                    " bits, database has " + std::to_string(db.k));
  // Counting sort over the K + 1 possible distances keeps the tie rule stable.
  std::vector<std::vector<std::size_t>> buckets(db.k + 1);
  for (std::size_t i = 0; i < db.rows; ++i) buckets[hamming_distance(query, db.row(i))].push_back(i);
  std::vector<std::size_t> order;
  order.reserve(db.rows);
  for (const auto& bucket : buckets) order.insert(order.end(), bucket.begin(), bucket.end());
  return order;
}

// AP@k over a full ranked relevance list, normalized by min(k, #relevant).
inline double average_precision(std::span<const std::uint8_t> ranked_relevant, std::size_t k) {
  require(k >= 1, "average_precision: k must be at least 1");
  std::size_t total = 0;
  for (std::uint8_t r : ranked_relevant) total += r != 0;
  if (total == 0) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  const std::size_t limit = std::min(k, ranked_relevant.size());
  for (std::size_t r = 0; r < limit; ++r) {
    if (ranked_relevant[r] != 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(std::min(k, total));
}

struct RetrievalTask {
  Direction direction = Direction::kImageToText;
  CodeMatrix query;
  CodeMatrix database;
  std::function<bool(std::size_t, std::size_t)> relevant;
  std::size_t k = 50;
};

inline double map_at_k(const RetrievalTask& task) {
  require(task.query.rows > 0, "map_at_k: empty query set");
  require(task.query.k == task.database.k, "map_at_k: query and database code lengths differ");
  require(static_cast<bool>(task.relevant), "map_at_k: no relevance predicate");
  double sum = 0.0;
  std::vector<std::uint8_t> flags(task.database.rows);
  for (std::size_t q = 0; q < task.query.rows; ++q) {
    const auto order = hamming_rank(task.query.row(q), task.database);
    for (std::size_t r = 0; r < order.size(); ++r) flags[r] = task.relevant(q, order[r]) ? 1 : 0;
    sum += average_precision(flags, task.k);
  }
  return sum / static_cast<double>(task.query.rows);
}

// Relevant when the two label sets intersect. Both sets must be sorted.
inline std::function<bool(std::size_t, std::size_t)> shared_label_relevance(
    std::vector<std::vector<int>> query_labels, std::vector<std::vector<int>> db_labels) {
  return [q = std::move(query_labels), d = std::move(db_labels)](std::size_t a, std::size_t b) {
    const auto& x = q.at(a);
    const auto& y = d.at(b);
    auto i = x.begin();
    auto j = y.begin();
    while (i != x.end() && j != y.end()) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        return true;
      }
    }
    return false;
  };
}

// Unit-weight d_max-clipped kNN graph in Hamming space with AND
// symmetrization; similarity is K - distance so ties fall to the lower index.
inline ClippedGraph hamming_knn_graph(const CodeMatrix& codes, int d_max) {
  const std::size_t n = codes.rows;
  require(n >= 2, "hamming graph needs at least two items");
  require(d_max >= 1 && static_cast<std::size_t>(d_max) < n, "d_max must lie in [1, n)");
  Matrix similarity(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    similarity(i, i) = static_cast<double>(codes.k);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = static_cast<double>(codes.k) - hamming_distance(codes.row(i), codes.row(j));
      similarity(i, j) = s;
      similarity(j, i) = s;
    }
  }
  const auto lists = candidate_lists(similarity, d_max, -1.0);
  ClippedGraph out{SparseWeightedGraph(n, 1.0), d_max};
  for (auto [i, j] : and_symmetrize(lists)) out.graph.add_edge(i, j, 1.0);
  return out;
}

struct TriangleCountError {
  double tce = 0.0;
  std::uint64_t hamming_triangles = 0;
  std::uint64_t reference_triangles = 0;
};

// |T_H - T_G| / max(T_G, 1) with unweighted triangle counts.
inline TriangleCountError triangle_count_error(std::uint64_t hamming_triangles,
                                               std::uint64_t reference_triangles) {
  TriangleCountError out{0.0, hamming_triangles, reference_triangles};
  const double diff = std::fabs(static_cast<double>(hamming_triangles) -
                                static_cast<double>(reference_triangles));
  out.tce = diff / std::max(1.0, static_cast<double>(reference_triangles));
  return out;
}

inline TriangleCountError triangle_count_error(const CodeMatrix& codes,
                                               const SparseWeightedGraph& reference, int d_max) {
  require(codes.rows == reference.n_nodes(), "triangle_count_error: codes cover " +
                                                 std::to_string(codes.rows) +
                                                 " items, reference graph has " +
                                                 std::to_string(reference.n_nodes()));
  const ClippedGraph induced = hamming_knn_graph(codes, d_max);
  return triangle_count_error(triangle_stats(induced.graph).triangles,
                              triangle_stats(reference).triangles);
}

}  // namespace motifdp

#endif  // MOTIFDP_METRICS_HPP_
