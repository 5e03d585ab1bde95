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

// In-memory orchestration of the full protocol: generate, split, clip,
// synthesize, distill, evaluate.

#ifndef MOTIFDP_PIPELINE_HPP_
#define MOTIFDP_PIPELINE_HPP_

#include <cstdint>
#include <string>

#include "motifdp/config.hpp"
#include "motifdp/dataset.hpp"
#include "motifdp/graph.hpp"
#include "motifdp/hashing.hpp"
#include "motifdp/metrics.hpp"
#include "motifdp/synthesis.hpp"

namespace motifdp {

struct MetricsReport {
  double map_i2t = 0.0;
  double map_t2i = 0.0;
  double map_avg = 0.0;
  // Mean of the image-code and text-code triangle count errors.
  double tce = 0.0;
  int k_bits = 0;
  int k_cutoff = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

inline Json to_json(const MetricsReport& m) {
  return {{"map_i2t", m.map_i2t}, {"map_t2i", m.map_t2i},   {"map_avg", m.map_avg},
          {"tce", m.tce},         {"k_bits", m.k_bits},     {"k_cutoff", m.k_cutoff},
          {"seed", m.seed},       {"config_digest", m.config_digest}};
}

inline ClippedGraph clipped_training_graph(const FeatureTable& train, const GraphConfig& graph) {
  return build_clipped_graph(joint_features(train), graph.d_max, graph.w_floor);
}

// Ground-truth graph for the triangle count error: the clipped graph, or the
// unclipped w_floor-thresholded similarity graph.
inline SparseWeightedGraph reference_graph(const FeatureTable& train, const GraphConfig& graph,
                                           const std::string& mode) {
  if (mode == "clipped") return clipped_training_graph(train, graph).graph;
  require(mode == "raw", "tce reference must be 'clipped' or 'raw'");
  const Matrix sim = cosine_similarity(joint_features(train));
  return clip_similarity_graph(sim, static_cast<int>(train.size()) - 1, graph.w_floor).graph;
}

inline TrainingData training_data(const FeatureTable& train) {
  return TrainingData{train.ids, train.image, train.text};
}

// Database = training items, queries = held-out items, relevance = shared label.
inline MetricsReport evaluate_model(const HashModel& model, const FeatureTable& database,
                                    const FeatureTable& query,
                                    const SparseWeightedGraph& reference, int d_max,
                                    int k_cutoff) {
  require(k_cutoff >= 1, "k cutoff must be positive");
  const CodeMatrix db_image = binarize(model, database.image, Modality::kImage);
  const CodeMatrix db_text = binarize(model, database.text, Modality::kText);
  const CodeMatrix q_image = binarize(model, query.image, Modality::kImage);
  const CodeMatrix q_text = binarize(model, query.text, Modality::kText);
  auto relevance = shared_label_relevance(query.labels, database.labels);

  MetricsReport m;
  m.map_i2t = map_at_k({Direction::kImageToText, q_image, db_text, relevance,
                        static_cast<std::size_t>(k_cutoff)});
  m.map_t2i = map_at_k({Direction::kTextToImage, q_text, db_image, relevance,
                        static_cast<std::size_t>(k_cutoff)});
  m.map_avg = 0.5 * (m.map_i2t + m.map_t2i);
  m.tce = 0.5 * (triangle_count_error(db_image, reference, d_max).tce +
                 triangle_count_error(db_text, reference, d_max).tce);
  m.k_bits = static_cast<int>(model.config.k_bits);
  m.k_cutoff = k_cutoff;
  return m;
}

struct PipelineArtifacts {
  MultimodalDataset dataset;
  ClippedGraph clipped;
  SanitizedGraph sanitized;
  TrainResult trained;
};

inline MetricsReport run_pipeline(const RunConfig& config, PipelineArtifacts* artifacts = nullptr) {
  const RunConfig rc = config.resolved();
  MultimodalDataset dataset =
      inductive_split(generate_synthetic(rc.data), rc.query_fraction, rc.split_seed());
  check_no_query_leakage(dataset.split.train, dataset.split.query);
  const FeatureTable train_items = dataset.train();
  const FeatureTable query = dataset.query();

  ClippedGraph clipped = clipped_training_graph(train_items, rc.graph);
  SanitizedGraph sanitized = synthesize(clipped, rc.synthesis);
  sanitized.node_ids = train_items.ids;

  TrainResult trained = train(training_data(train_items), sanitized, rc.hash);
  const SparseWeightedGraph reference =
      rc.eval.tce_reference == "clipped" ? clipped.graph
                                         : reference_graph(train_items, rc.graph, rc.eval.tce_reference);
  MetricsReport report =
      evaluate_model(trained.model, train_items, query, reference, rc.graph.d_max, rc.eval.k_cutoff);
  report.seed = config.seed;
  report.config_digest = config_digest(config);
  if (artifacts != nullptr) {
    artifacts->dataset = std::move(dataset);
    artifacts->clipped = std::move(clipped);
    artifacts->sanitized = std::move(sanitized);
    artifacts->trained = std::move(trained);
  }
  return report;
}

}  // namespace motifdp

#endif  // MOTIFDP_PIPELINE_HPP_
