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

// Multimodal feature tables, the planted-community generator and the
// inductive train/query split.

#ifndef MOTIFDP_DATASET_HPP_
#define MOTIFDP_DATASET_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "motifdp/error.hpp"
#include "motifdp/graph.hpp"
#include "motifdp/seed.hpp"

namespace motifdp {

// Row r holds item ids[r]: its image and text features and its sorted label set.
struct FeatureTable {
  std::vector<std::int64_t> ids;
  std::vector<std::vector<int>> labels;
  Matrix image;
  Matrix text;

  std::size_t size() const { return ids.size(); }

  void validate() const {
    const auto n = static_cast<Eigen::Index>(ids.size());
    require(labels.size() == ids.size(), "label rows do not match ids");
    require(image.rows() == n && text.rows() == n, "feature rows do not match ids");
    require(image.allFinite() && text.allFinite(), "features must be finite");
    std::vector<std::int64_t> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "duplicate item id");
  }

  friend bool operator==(const FeatureTable& a, const FeatureTable& b) {
    return a.ids == b.ids && a.labels == b.labels && a.image == b.image && a.text == b.text;
  }
};

// Rows whose ids appear in `keep`, in the order of `keep`.
inline FeatureTable select_items(const FeatureTable& table, std::span<const std::int64_t> keep) {
  std::unordered_map<std::int64_t, std::size_t> row_of;
  for (std::size_t r = 0; r < table.ids.size(); ++r) row_of.emplace(table.ids[r], r);
  FeatureTable out;
  out.image.resize(static_cast<Eigen::Index>(keep.size()), table.image.cols());
  out.text.resize(static_cast<Eigen::Index>(keep.size()), table.text.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    auto it = row_of.find(keep[r]);
    require(it != row_of.end(), "unknown item id " + std::to_string(keep[r]));
    out.ids.push_back(keep[r]);
    out.labels.push_back(table.labels[it->second]);
    out.image.row(r) = table.image.row(it->second);
    out.text.row(r) = table.text.row(it->second);
  }
  return out;
}

struct Split {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> query;

  friend bool operator==(const Split&, const Split&) = default;
};

struct MultimodalDataset {
  FeatureTable items;
  Split split;
  // Ids of generated hub items, sorted; empty for loaded data.
  std::vector<std::int64_t> hubs;

  FeatureTable train() const { return select_items(items, split.train); }
  FeatureTable query() const { return select_items(items, split.query); }
};

struct SyntheticConfig {
  int n_items = 800;
  int n_communities = 4;
  int image_dim = 32;
  int text_dim = 32;
  // Norm of the isotropic per-item noise relative to the unit anchors.
  double noise = 0.6;
  double text_noise = 0.6;
  // Length of the direction shared by every anchor; cross-community cosine
  // is negative while offset^2 < 1 / (n_communities - 1).
  double offset = 0.3;
  double hub_fraction = 0.0;
  // Mixing weight toward the global mean direction for hub items.
  double hub_spread = 0.7;
  std::uint64_t seed = 0;

  void validate() const {
    require(n_items >= 2, "n_items must be at least 2");
    require(n_communities >= 2, "n_communities must be at least 2");
    require(image_dim >= 1 && text_dim >= 1, "feature dimensions must be positive");
    require(std::isfinite(noise) && noise >= 0.0 && std::isfinite(text_noise) && text_noise >= 0.0,
            "noise scales must be nonnegative");
    require(std::isfinite(offset) && offset >= 0.0, "offset must be nonnegative");
    require(hub_fraction >= 0.0 && hub_fraction < 1.0, "hub_fraction must lie in [0, 1)");
    require(hub_spread >= 0.0 && hub_spread <= 1.0, "hub_spread must lie in [0, 1]");
  }
};

namespace internal {

inline Matrix planted_features(const std::vector<int>& community, int n_communities, int dim,
                               double noise, double offset, const std::vector<bool>& hub,
                               double hub_spread, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix anchors(n_communities, dim);
  for (Eigen::Index i = 0; i < anchors.size(); ++i) anchors.data()[i] = gauss(rng);
  Eigen::RowVectorXd shared(dim);
  for (int d = 0; d < dim; ++d) shared(d) = gauss(rng);
  const Eigen::RowVectorXd mean = anchors.colwise().mean();
  anchors.rowwise() -= mean;
  // Keep anchors orthogonal to the shared direction so offset is exact.
  shared /= shared.norm();
  for (int c = 0; c < n_communities; ++c) {
    anchors.row(c) -= anchors.row(c).dot(shared) * shared;
    const double norm = anchors.row(c).norm();
    if (norm > 0.0) anchors.row(c) /= norm;
  }

  const auto n = static_cast<Eigen::Index>(community.size());
  Matrix x(n, dim);
  const double scale = noise / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = anchors.row(community[i]) + offset * shared;
    for (int d = 0; d < dim; ++d) x(i, d) += scale * gauss(rng);
  }
  const Eigen::RowVectorXd center = x.colwise().mean();
  const double center_norm = center.norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!hub[i] || center_norm == 0.0) continue;
    x.row(i) = (1.0 - hub_spread) * x.row(i) + hub_spread * x.row(i).norm() * center / center_norm;
  }
  return x;
}

}  // namespace internal

// Items draw a community uniformly. Features in each modality are noisy
// copies of per-community anchors; hub items are pulled toward the global
// mean direction so they resemble many items. Labels are community ids.
inline MultimodalDataset generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  std::mt19937_64 rng(derive_seed(config.seed, "synthetic-data"));
  const auto n = static_cast<std::size_t>(config.n_items);
  std::uniform_int_distribution<int> pick(0, config.n_communities - 1);
  std::vector<int> community(n);
  for (auto& c : community) c = pick(rng);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_hubs = static_cast<std::size_t>(std::llround(config.hub_fraction * n));
  std::vector<bool> hub(n, false);
  for (std::size_t h = 0; h < n_hubs; ++h) hub[order[h]] = true;

  MultimodalDataset ds;
  ds.items.image = internal::planted_features(community, config.n_communities, config.image_dim,
                                              config.noise, config.offset, hub, config.hub_spread,
                                              rng);
  ds.items.text = internal::planted_features(community, config.n_communities, config.text_dim,
                                             config.text_noise, config.offset, hub,
                                             config.hub_spread, rng);
  for (std::size_t i = 0; i < n; ++i) {
    ds.items.ids.push_back(static_cast<std::int64_t>(i));
    ds.items.labels.push_back({community[i]});
    if (hub[i]) ds.hubs.push_back(static_cast<std::int64_t>(i));
  }
  ds.split.train = ds.items.ids;
  return ds;
}

// Disjoint partition with round(query_fraction * n) query items.
inline Split inductive_split(std::span<const std::int64_t> ids, double query_fraction,
                             std::uint64_t seed) {
  require(query_fraction > 0.0 && query_fraction < 1.0, "query_fraction must lie in (0, 1)");
  const auto n_query = static_cast<std::size_t>(std::llround(query_fraction * ids.size()));
  require(n_query >= 1 && n_query < ids.size(),
          "query_fraction leaves an empty train or query partition");
  std::vector<std::int64_t> shuffled(ids.begin(), ids.end());
  std::mt19937_64 rng(derive_seed(seed, "inductive-split"));
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  Split split;
  split.query.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_query));
  split.train.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_query), shuffled.end());
  std::sort(split.query.begin(), split.query.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

inline MultimodalDataset inductive_split(MultimodalDataset dataset, double query_fraction,
                                         std::uint64_t seed) {
  dataset.split = inductive_split(dataset.items.ids, query_fraction, seed);
  return dataset;
}

// Graph-construction input restricted to the training partition. Any query id
// in `train` is a leak and fails hard.
inline void check_no_query_leakage(std::span<const std::int64_t> train,
                                   std::span<const std::int64_t> query) {
  std::vector<std::int64_t> q(query.begin(), query.end());
  std::sort(q.begin(), q.end());
  for (std::int64_t id : train) {
    if (std::binary_search(q.begin(), q.end(), id))
      throw InvariantViolation("query item " + std::to_string(id) +
                               " leaked into graph-construction input");
  }
}

// Concatenation of the per-modality unit-normalized features; used as the
// similarity space for graph construction.
inline Matrix joint_features(const FeatureTable& table) {
  Matrix out(table.image.rows(), table.image.cols() + table.text.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double ni = table.image.row(i).norm();
    const double nt = table.text.row(i).norm();
    require(ni > 0.0 && nt > 0.0, "item " + std::to_string(table.ids[i]) + " has a zero feature");
    out.row(i) << table.image.row(i) / ni, table.text.row(i) / nt;
  }
  return out;
}

}  // namespace motifdp

#endif  // MOTIFDP_DATASET_HPP_
