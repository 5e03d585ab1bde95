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

#include "motifdp/hashing.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <type_traits>

#include <gtest/gtest.h>

#include "motifdp/dataset.hpp"
#include "motifdp/error.hpp"
#include "motifdp/graph.hpp"
#include "motifdp/synthesis.hpp"

namespace motifdp {
namespace {

// The distillation entry point takes features and the release, nothing else.
static_assert(std::is_same_v<decltype(&train), TrainResult (*)(const TrainingData&,
                                                               const SanitizedGraph&,
                                                               const HashModelConfig&)>);

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi,
                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Matrix symmetric_target(Eigen::Index b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix t = Matrix::Identity(b, b);
  for (Eigen::Index i = 0; i < b; ++i)
    for (Eigen::Index j = i + 1; j < b; ++j) t(i, j) = t(j, i) = u(rng) < 0.4 ? 0.0 : u(rng);
  return t;
}

TEST(SimilaritySTest, ReferenceValues) {
  const std::vector<double> ones(16, 1.0);
  std::vector<double> minus(16, -1.0);
  EXPECT_EQ(similarity_S(ones, ones), 1.0);
  EXPECT_EQ(similarity_S(ones, minus), 0.0);
  std::vector<double> half = ones;
  for (std::size_t i = 0; i < 8; ++i) half[i] = -1.0;
  EXPECT_EQ(similarity_S(ones, half), 0.5);
  EXPECT_THROW(similarity_S(ones, std::vector<double>(8, 1.0)), InvalidArgument);
}

TEST(SimilaritySTest, RangeOnHypercube) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix m = uniform_matrix(2, 12, -1.0, 1.0, rng);
    const double s = similarity_S({m.data(), 12}, {m.data() + 12, 12});
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(HolisticLossTest, ZeroAtExactCodes) {
  Matrix u(3, 4);
  u << 1, 1, 1, 1,  //
      1, 1, -1, -1,  //
      -1, -1, -1, -1;
  Matrix t(3, 3);
  t << 1.0, 0.5, 0.0,  //
      0.5, 1.0, 0.5,  //
      0.0, 0.5, 1.0;
  const HolisticLoss l = holistic_loss(u, u, t, 1.0, 0.1);
  EXPECT_EQ(l.loss, 0.0);
  EXPECT_EQ(l.quantization, 0.0);
  EXPECT_TRUE(l.grad_u.isZero());
  EXPECT_TRUE(l.grad_v.isZero());
}

TEST(HolisticLossTest, SingleZeroEmbeddingIncludesDiagonal) {
  for (int k : {1, 4, 16}) {
    const Matrix zero = Matrix::Zero(1, k);
    const Matrix t = Matrix::Ones(1, 1);
    EXPECT_DOUBLE_EQ(holistic_loss(zero, zero, t, 1.0, 0.0).loss, 0.75);
    EXPECT_DOUBLE_EQ(holistic_loss(zero, zero, t, 0.0, 0.0).loss, 0.5);
    EXPECT_DOUBLE_EQ(holistic_loss(zero, zero, t, 1.0, 0.1).loss, 0.75 + 0.1 * 2.0 * k);
  }
}

TEST(HolisticLossTest, QuantizationVanishesOnlyOnVertices) {
  Matrix u = Matrix::Ones(2, 3);
  u(1, 2) = -1.0;
  const Matrix t = Matrix::Identity(2, 2);
  EXPECT_EQ(holistic_loss(u, u, t, 1.0, 1.0).quantization, 0.0);
  u(0, 1) = 0.999;
  EXPECT_GT(holistic_loss(u, u, t, 1.0, 1.0).quantization, 0.0);
}

TEST(HolisticLossTest, ShapeMismatchRejected) {
  const Matrix u = Matrix::Zero(2, 4);
  EXPECT_THROW(holistic_loss(u, Matrix::Zero(2, 3), Matrix::Identity(2, 2), 1.0, 0.0),
               InvalidArgument);
  EXPECT_THROW(holistic_loss(u, u, Matrix::Identity(3, 3), 1.0, 0.0), InvalidArgument);
}

TEST(HolisticLossTest, GradientsMatchCentralDifferences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const auto b = std::uniform_int_distribution<Eigen::Index>(1, 8)(rng);
    const auto k = std::uniform_int_distribution<Eigen::Index>(1, 6)(rng);
    const double lambda = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    const double gamma = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    Matrix u = uniform_matrix(b, k, -0.95, 0.95, rng);
    Matrix v = uniform_matrix(b, k, -0.95, 0.95, rng);
    const Matrix t = symmetric_target(b, rng);
    const HolisticLoss l = holistic_loss(u, v, t, lambda, gamma);
    const double h = 1e-6;
    for (Matrix* m : {&u, &v}) {
      const Matrix& analytic = m == &u ? l.grad_u : l.grad_v;
      for (Eigen::Index i = 0; i < m->size(); ++i) {
        const double keep = m->data()[i];
        m->data()[i] = keep + h;
        const double up = holistic_loss(u, v, t, lambda, gamma).loss;
        m->data()[i] = keep - h;
        const double down = holistic_loss(u, v, t, lambda, gamma).loss;
        m->data()[i] = keep;
        const double fd = (up - down) / (2.0 * h);
        EXPECT_NEAR(analytic.data()[i], fd, 1e-5 * std::max(1.0, std::fabs(fd)));
      }
    }
  }
}

TEST(HolisticLossTest, SwappingStreamsKeepsLoss) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix u = uniform_matrix(6, 8, -1.0, 1.0, rng);
    const Matrix v = uniform_matrix(6, 8, -1.0, 1.0, rng);
    const Matrix t = symmetric_target(6, rng);
    const HolisticLoss a = holistic_loss(u, v, t, 0.7, 0.2);
    const HolisticLoss b = holistic_loss(v, u, t, 0.7, 0.2);
    EXPECT_NEAR(a.loss, b.loss, 1e-12 * std::max(1.0, a.loss));
    EXPECT_TRUE(a.grad_u.isApprox(b.grad_v, 1e-12));
  }
}

TEST(AdamStepTest, FirstStepMovesByLearningRate) {
  std::vector<double> p = {0.5};
  AdamState s;
  adam_step(p, std::vector<double>{1.0}, s, AdamConfig{.lr = 0.1});
  EXPECT_NEAR(p[0], 0.4, 1e-8);
  EXPECT_EQ(s.t, 1);
}

TEST(AdamStepTest, ZeroGradientLeavesParameters) {
  std::vector<double> p = {0.5, -2.0, 3.0};
  const std::vector<double> start = p;
  AdamState s;
  for (int i = 0; i < 10; ++i) adam_step(p, std::vector<double>(3, 0.0), s, AdamConfig{});
  EXPECT_EQ(p, start);
}

TEST(AdamStepTest, RejectsNonFiniteGradient) {
  std::vector<double> p = {0.5};
  AdamState s;
  EXPECT_THROW(adam_step(p, std::vector<double>{std::nan("")}, s, AdamConfig{}), InvalidArgument);
  EXPECT_THROW(adam_step(p, std::vector<double>{1.0, 2.0}, s, AdamConfig{}), InvalidArgument);
}

TEST(BinarizeTest, SignConvention) {
  Matrix e(2, 3);
  e << 0.5, 0.0, -0.0,  //
      -0.2, 1e-300, -1e-300;
  const CodeMatrix c = binarize(e);
  EXPECT_EQ(c.bits, (std::vector<std::int8_t>{1, 1, 1, -1, 1, -1}));
  EXPECT_EQ(binarize(Matrix::Constant(3, 4, 0.3)).bits, std::vector<std::int8_t>(12, 1));
}

TEST(BinarizeTest, IdempotentOnCodes) {
  std::mt19937_64 rng(8);
  const Matrix e = uniform_matrix(5, 16, -1.0, 1.0, rng);
  const CodeMatrix c = binarize(e);
  Matrix as_input(5, 16);
  for (Eigen::Index i = 0; i < as_input.size(); ++i) as_input.data()[i] = c.bits[i];
  EXPECT_EQ(binarize(as_input), c);
}

struct SmallProblem {
  TrainingData data;
  SanitizedGraph release;
  std::vector<int> community;
  HashModelConfig config;
};

SmallProblem two_community_problem(std::uint64_t seed) {
  SyntheticConfig sc;
  sc.n_items = 120;
  sc.n_communities = 2;
  sc.image_dim = 16;
  sc.text_dim = 16;
  sc.seed = seed;
  const MultimodalDataset ds = generate_synthetic(sc);
  SmallProblem p;
  p.data = TrainingData{ds.items.ids, ds.items.image, ds.items.text};
  for (const auto& l : ds.items.labels) p.community.push_back(l.front());
  SynthesisConfig syn;
  syn.audit_noiseless = true;
  syn.t_steps = 200;
  p.release = synthesize(build_clipped_graph(joint_features(ds.items), 10), syn);
  p.release.node_ids = ds.items.ids;
  p.config.image_dim = 16;
  p.config.text_dim = 16;
  p.config.hidden_dim = 32;
  p.config.epochs = 60;
  p.config.seed = seed;
  return p;
}

TEST(TrainTest, ZeroEpochsReturnsInitialModel) {
  SmallProblem p = two_community_problem(1);
  p.config.epochs = 0;
  const TrainResult r = train(p.data, p.release, p.config);
  EXPECT_EQ(r.model, init_model(p.config));
  EXPECT_TRUE(r.loss_trace.empty());
}

TEST(TrainTest, DeterministicPerSeed) {
  SmallProblem p = two_community_problem(2);
  p.config.epochs = 5;
  p.config.batch_size = 32;
  const TrainResult a = train(p.data, p.release, p.config);
  const TrainResult b = train(p.data, p.release, p.config);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  EXPECT_EQ(a.loss_trace.size(), 5u);
}

TEST(TrainTest, ForwardOutputsStayInsideOpenCube) {
  SmallProblem p = two_community_problem(3);
  const HashModel m = init_model(p.config);
  const Matrix u = m.encode(p.data.image * 100.0, Modality::kImage);
  EXPECT_LT(u.cwiseAbs().maxCoeff(), 1.0);
}

TEST(TrainTest, RejectsMisalignedRelease) {
  SmallProblem p = two_community_problem(4);
  SanitizedGraph shifted = p.release;
  std::swap(shifted.node_ids[0], shifted.node_ids[1]);
  EXPECT_THROW(train(p.data, shifted, p.config), InvalidArgument);
  SanitizedGraph smaller = p.release;
  smaller.n_nodes -= 1;
  smaller.node_ids.clear();
  EXPECT_THROW(train(p.data, smaller, p.config), InvalidArgument);
}

double mean_quantization_gap(const Matrix& u) {
  return (u.array().abs() - 1.0).matrix().rowwise().norm().mean();
}

TEST(TrainTest, LargeQuantizationWeightPullsTowardVertices) {
  SmallProblem p = two_community_problem(5);
  p.config.gamma_quant = 10.0;
  const double before = mean_quantization_gap(init_model(p.config).encode(p.data.image, Modality::kImage));
  const TrainResult r = train(p.data, p.release, p.config);
  const double after = mean_quantization_gap(r.model.encode(p.data.image, Modality::kImage));
  EXPECT_LT(after, before);
}

TEST(TrainTest, WithinCommunitySimilarityExceedsCross) {
  SmallProblem p = two_community_problem(6);
  const TrainResult r = train(p.data, p.release, p.config);
  for (Modality m : {Modality::kImage, Modality::kText}) {
    const Matrix u = r.model.encode(m == Modality::kImage ? p.data.image : p.data.text, m);
    double within = 0.0, cross = 0.0;
    std::size_t n_within = 0, n_cross = 0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < u.rows(); ++j) {
        const auto k = static_cast<std::size_t>(u.cols());
        const double s = similarity_S({u.row(i).data(), k}, {u.row(j).data(), k});
        if (p.community[i] == p.community[j]) {
          within += s;
          ++n_within;
        } else {
          cross += s;
          ++n_cross;
        }
      }
    }
    EXPECT_GT(within / n_within, cross / n_cross + 0.1);
  }
}

TEST(TargetLookupTest, DiagonalOneAndMissingZero) {
  SanitizedGraph g;
  g.n_nodes = 4;
  g.entries = {{0, 2, 0.25}, {1, 3, 0.5}};
  const TargetLookup t(g);
  EXPECT_EQ(t(0, 0), 1.0);
  EXPECT_EQ(t(2, 0), 0.25);
  EXPECT_EQ(t(3, 1), 0.5);
  EXPECT_EQ(t(0, 1), 0.0);
  const std::vector<std::size_t> batch = {2, 3, 0};
  Matrix expected(3, 3);
  expected << 1.0, 0.0, 0.25,  //
      0.0, 1.0, 0.0,  //
      0.25, 0.0, 1.0;
  EXPECT_EQ(t.block(batch), expected);
}

}  // namespace
}  // namespace motifdp
