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

// Sensitivity-bounded similarity graphs and exact weighted triangle-motif
// statistics.

#ifndef MOTIFDP_GRAPH_HPP_
#define MOTIFDP_GRAPH_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "motifdp/error.hpp"

namespace motifdp {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using NodeId = std::int32_t;

struct Edge {
  NodeId i = 0;
  NodeId j = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  NodeId node = 0;
  double w = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Undirected graph with strictly positive weights bounded by w_max. Storing
// (i, j) means the edge exists in both directions; adjacency lists are kept
// sorted by neighbor index.
class SparseWeightedGraph {
 public:
  SparseWeightedGraph() = default;
  explicit SparseWeightedGraph(std::size_t n_nodes, double w_max = 1.0)
      : adjacency_(n_nodes), w_max_(w_max) {
    require(w_max > 0.0 && std::isfinite(w_max), "w_max must be positive and finite");
  }

  static SparseWeightedGraph from_edges(std::size_t n_nodes, std::span<const Edge> edges,
                                        double w_max = 1.0) {
    SparseWeightedGraph g(n_nodes, w_max);
    for (const Edge& e : edges) g.add_edge(e.i, e.j, e.w);
    return g;
  }

  void add_edge(NodeId a, NodeId b, double w) {
    const auto n = static_cast<NodeId>(adjacency_.size());
    require(a >= 0 && b >= 0 && a < n && b < n,
            "edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
    require(a != b, "self loop at node " + std::to_string(a));
    require(std::isfinite(w) && w > 0.0 && w <= w_max_,
            "edge weight " + std::to_string(w) + " outside (0, w_max]");
    require(!has_edge(a, b),
            "duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    insert_sorted(adjacency_[a], Neighbor{b, w});
    insert_sorted(adjacency_[b], Neighbor{a, w});
    ++n_edges_;
  }

  void remove_edge(NodeId a, NodeId b) {
    require(has_edge(a, b), "no edge to remove");
    erase_node(adjacency_[a], b);
    erase_node(adjacency_[b], a);
    --n_edges_;
  }

  void set_weight(NodeId a, NodeId b, double w) {
    require(std::isfinite(w) && w > 0.0 && w <= w_max_, "weight outside (0, w_max]");
    find(adjacency_[a], b)->w = w;
    find(adjacency_[b], a)->w = w;
  }

  std::size_t n_nodes() const { return adjacency_.size(); }
  std::size_t n_edges() const { return n_edges_; }
  double w_max() const { return w_max_; }

  std::span<const Neighbor> neighbors(NodeId i) const { return adjacency_.at(i); }
  std::size_t degree(NodeId i) const { return adjacency_.at(i).size(); }

  bool has_edge(NodeId a, NodeId b) const {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= adjacency_.size()) return false;
    const auto& row = adjacency_[a];
    auto it = std::lower_bound(row.begin(), row.end(), b,
                               [](const Neighbor& x, NodeId v) { return x.node < v; });
    return it != row.end() && it->node == b;
  }

  // Zero when the edge is absent.
  double weight(NodeId a, NodeId b) const {
    if (a < 0 || static_cast<std::size_t>(a) >= adjacency_.size()) return 0.0;
    const auto& row = adjacency_[a];
    auto it = std::lower_bound(row.begin(), row.end(), b,
                               [](const Neighbor& x, NodeId v) { return x.node < v; });
    return (it != row.end() && it->node == b) ? it->w : 0.0;
  }

  // Edges with i < j in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(n_edges_);
    for (std::size_t i = 0; i < adjacency_.size(); ++i) {
      for (const Neighbor& nb : adjacency_[i]) {
        if (static_cast<std::size_t>(nb.node) > i)
          out.push_back(Edge{static_cast<NodeId>(i), nb.node, nb.w});
      }
    }
    return out;
  }

  Matrix dense() const {
    Matrix m = Matrix::Zero(n_nodes(), n_nodes());
    for (std::size_t i = 0; i < adjacency_.size(); ++i)
      for (const Neighbor& nb : adjacency_[i]) m(i, nb.node) = nb.w;
    return m;
  }

  friend bool operator==(const SparseWeightedGraph& a, const SparseWeightedGraph& b) {
    return a.w_max_ == b.w_max_ && a.adjacency_ == b.adjacency_;
  }

 private:
  static std::vector<Neighbor>::iterator find(std::vector<Neighbor>& row, NodeId v) {
    auto it = std::lower_bound(row.begin(), row.end(), v,
                               [](const Neighbor& x, NodeId u) { return x.node < u; });
    require(it != row.end() && it->node == v, "edge not present");
    return it;
  }
  static void insert_sorted(std::vector<Neighbor>& row, Neighbor nb) {
    auto it = std::lower_bound(row.begin(), row.end(), nb.node,
                               [](const Neighbor& x, NodeId v) { return x.node < v; });
    row.insert(it, nb);
  }
  static void erase_node(std::vector<Neighbor>& row, NodeId v) { row.erase(find(row, v)); }

  std::vector<std::vector<Neighbor>> adjacency_;
  std::size_t n_edges_ = 0;
  double w_max_ = 1.0;
};

struct ClippedGraph {
  SparseWeightedGraph graph;
  int d_max = 0;

  std::size_t max_degree() const {
    std::size_t m = 0;
    for (std::size_t i = 0; i < graph.n_nodes(); ++i)
      m = std::max(m, graph.degree(static_cast<NodeId>(i)));
    return m;
  }

  friend bool operator==(const ClippedGraph&, const ClippedGraph&) = default;
};

// Per-edge motif mass tau_ij = sum_k W_ik W_jk over common neighbors k, in the
// order of graph.edges().
struct EdgeMotif {
  NodeId i = 0;
  NodeId j = 0;
  double tau = 0.0;
  std::uint64_t common = 0;
};

struct TriangleStats {
  std::vector<EdgeMotif> per_edge;
  // Weighted triangle mass sum_{i<j} W_ij tau_ij / 3.
  double total = 0.0;
  // Unweighted triangle count.
  std::uint64_t triangles = 0;

  double tau(NodeId a, NodeId b) const {
    if (a > b) std::swap(a, b);
    auto it = std::lower_bound(per_edge.begin(), per_edge.end(), std::pair{a, b},
                               [](const EdgeMotif& m, const std::pair<NodeId, NodeId>& p) {
                                 return std::pair{m.i, m.j} < p;
                               });
    return (it != per_edge.end() && it->i == a && it->j == b) ? it->tau : 0.0;
  }
};

struct DegreeStats {
  std::size_t max_degree = 0;
  double mean_degree = 0.0;
  double total_weight = 0.0;
};

// Dense cosine similarity between rows. The diagonal is exactly 1 and the
// result is exactly symmetric.
inline Matrix cosine_similarity(const Matrix& features) {
  const auto n = features.rows();
  require(n >= 2, "cosine_similarity needs at least two rows");
  Vector norms(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norms(i) = features.row(i).norm();
    if (!(norms(i) > 0.0) || !std::isfinite(norms(i)))
      throw InvalidArgument("row " + std::to_string(i) + " has zero or non-finite norm");
  }
  Matrix normalized = features;
  for (Eigen::Index i = 0; i < n; ++i) normalized.row(i) /= norms(i);
  Matrix sim = normalized * normalized.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    sim(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::clamp(sim(i, j), -1.0, 1.0);
      sim(i, j) = v;
      sim(j, i) = v;
    }
  }
  return sim;
}

// For each node, the indices of its d_max most similar other nodes with
// similarity strictly above w_floor. Ties go to the lower index. Each list is
// returned sorted by index.
inline std::vector<std::vector<NodeId>> candidate_lists(const Matrix& similarity, int d_max,
                                                        double w_floor) {
  const auto n = similarity.rows();
  require(similarity.cols() == n, "similarity matrix must be square");
  require(d_max >= 1, "d_max must be at least 1");
  std::vector<std::vector<NodeId>> lists(n);
  std::vector<NodeId> order;
  for (Eigen::Index i = 0; i < n; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i && similarity(i, j) > w_floor) order.push_back(static_cast<NodeId>(j));
    const auto keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(d_max));
    auto by_similarity = [&](NodeId a, NodeId b) {
      const double sa = similarity(i, a), sb = similarity(i, b);
      return sa != sb ? sa > sb : a < b;
    };
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), by_similarity);
    order.resize(keep);
    std::sort(order.begin(), order.end());
    lists[i] = order;
  }
  return lists;
}

// Unordered pairs (i < j) where both endpoints list each other.
inline std::vector<std::pair<NodeId, NodeId>> and_symmetrize(
    const std::vector<std::vector<NodeId>>& lists) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (NodeId j : lists[i]) {
      if (static_cast<std::size_t>(j) <= i) continue;
      const auto& back = lists[j];
      if (std::binary_search(back.begin(), back.end(), static_cast<NodeId>(i)))
        out.emplace_back(static_cast<NodeId>(i), j);
    }
  }
  return out;
}

// Unordered pairs (i < j) where at least one endpoint lists the other.
inline std::vector<std::pair<NodeId, NodeId>> or_symmetrize(
    const std::vector<std::vector<NodeId>>& lists) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (NodeId j : lists[i]) {
      const auto a = std::min(static_cast<NodeId>(i), j), b = std::max(static_cast<NodeId>(i), j);
      out.emplace_back(a, b);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Degree-clipped graph over a precomputed similarity matrix. Edge weights are
// max(similarity, 0) clamped to [0, 1]; zero-weight pairs are dropped.
inline ClippedGraph clip_similarity_graph(const Matrix& similarity, int d_max, double w_floor) {
  const auto n = static_cast<std::size_t>(similarity.rows());
  require(n >= 2, "graph construction needs at least two nodes");
  require(d_max >= 1, "d_max must be at least 1");
  require(static_cast<std::size_t>(d_max) < n,
          "d_max=" + std::to_string(d_max) + " must be below the node count " + std::to_string(n));
  const auto lists = candidate_lists(similarity, d_max, w_floor);
  ClippedGraph out{SparseWeightedGraph(n, 1.0), d_max};
  for (auto [i, j] : and_symmetrize(lists)) {
    const double w = std::clamp(similarity(i, j), 0.0, 1.0);
    if (w > 0.0) out.graph.add_edge(i, j, w);
  }
  ensure(out.max_degree() <= static_cast<std::size_t>(d_max), "clipped graph exceeds d_max");
  return out;
}

inline ClippedGraph build_clipped_graph(const Matrix& features, int d_max, double w_floor = 0.0) {
  require(features.rows() >= 2, "graph construction needs at least two nodes");
  require(d_max >= 1, "d_max must be at least 1");
  require(d_max < features.rows(), "d_max=" + std::to_string(d_max) +
                                       " must be below the node count " +
                                       std::to_string(features.rows()));
  return clip_similarity_graph(cosine_similarity(features), d_max, w_floor);
}

inline TriangleStats triangle_stats(const SparseWeightedGraph& graph) {
  TriangleStats stats;
  stats.per_edge.reserve(graph.n_edges());
  double weighted = 0.0;
  std::uint64_t common_total = 0;
  for (std::size_t a = 0; a < graph.n_nodes(); ++a) {
    const auto row_a = graph.neighbors(static_cast<NodeId>(a));
    for (const Neighbor& ab : row_a) {
      if (static_cast<std::size_t>(ab.node) <= a) continue;
      const auto row_b = graph.neighbors(ab.node);
      double tau = 0.0;
      std::uint64_t common = 0;
      auto x = row_a.begin();
      auto y = row_b.begin();
      while (x != row_a.end() && y != row_b.end()) {
        if (x->node < y->node) {
          ++x;
        } else if (y->node < x->node) {
          ++y;
        } else {
          tau += x->w * y->w;
          ++common;
          ++x;
          ++y;
        }
      }
      stats.per_edge.push_back(EdgeMotif{static_cast<NodeId>(a), ab.node, tau, common});
      weighted += ab.w * tau;
      common_total += common;
    }
  }
  stats.total = weighted / 3.0;
  stats.triangles = common_total / 3;
  return stats;
}

inline constexpr std::size_t kBruteForceNodeLimit = 200;

// Test oracle: dense enumeration over every node triple.
inline TriangleStats triangle_stats_bruteforce(const SparseWeightedGraph& graph) {
  const std::size_t n = graph.n_nodes();
  require(n <= kBruteForceNodeLimit, "triangle_stats_bruteforce is limited to " +
                                         std::to_string(kBruteForceNodeLimit) + " nodes");
  const Matrix w = graph.dense();
  Matrix tau = Matrix::Zero(n, n);
  std::vector<std::uint64_t> common(n * n, 0);
  std::uint64_t triangles = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (w(i, j) == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j || w(i, k) == 0.0 || w(j, k) == 0.0) continue;
        tau(i, j) += w(i, k) * w(j, k);
        ++common[i * n + j];
        if (k > j) ++triangles;
      }
    }
  }
  TriangleStats stats;
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (w(i, j) == 0.0) continue;
      stats.per_edge.push_back(EdgeMotif{static_cast<NodeId>(i), static_cast<NodeId>(j),
                                         tau(i, j), common[i * n + j]});
      weighted += w(i, j) * tau(i, j);
    }
  }
  stats.total = weighted / 3.0;
  stats.triangles = triangles;
  return stats;
}

inline DegreeStats degree_stats(const SparseWeightedGraph& graph) {
  DegreeStats out;
  if (graph.n_nodes() == 0) return out;
  for (std::size_t i = 0; i < graph.n_nodes(); ++i)
    out.max_degree = std::max(out.max_degree, graph.degree(static_cast<NodeId>(i)));
  for (const Edge& e : graph.edges()) out.total_weight += e.w;
  out.mean_degree = 2.0 * static_cast<double>(graph.n_edges()) /
                    static_cast<double>(graph.n_nodes());
  return out;
}

}  // namespace motifdp

#endif  // MOTIFDP_GRAPH_HPP_
