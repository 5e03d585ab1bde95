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

// Dual-stream hash distillation: two dense encoders trained to reproduce a
// sanitized target graph in code-similarity space, then binarized.

#ifndef MOTIFDP_HASHING_HPP_
#define MOTIFDP_HASHING_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "motifdp/error.hpp"
#include "motifdp/graph.hpp"
#include "motifdp/seed.hpp"
#include "motifdp/synthesis.hpp"

namespace motifdp {

enum class Modality { kImage, kText };

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
};

inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
                      const AdamConfig& hyper) {
  require(params.size() == grads.size(), "adam: parameter and gradient sizes differ");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i]))
      throw InvalidArgument("adam: non-finite gradient at index " + std::to_string(i));
  }
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  require(state.m.size() == params.size(), "adam: state does not match parameters");
  ++state.t;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * grads[i];
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
  }
}

struct HashModelConfig {
  int k_bits = 16;
  int image_dim = 0;
  int text_dim = 0;
  int hidden_dim = 128;
  double lambda_cross = 1.0;
  double gamma_quant = 0.1;
  // Batches larger than the training set mean full-batch steps.
  int batch_size = 1024;
  int epochs = 100;
  AdamConfig adam{.lr = 0.02};
  std::uint64_t seed = 0;

  void validate() const {
    require(k_bits >= 1, "k_bits must be positive");
    require(image_dim >= 1 && text_dim >= 1, "feature dimensions must be positive");
    require(hidden_dim >= 1, "hidden_dim must be positive");
    require(std::isfinite(lambda_cross) && lambda_cross >= 0.0, "lambda_cross must be >= 0");
    require(std::isfinite(gamma_quant) && gamma_quant >= 0.0, "gamma_quant must be >= 0");
    require(batch_size >= 1, "batch_size must be positive");
    require(epochs >= 0, "epochs must be nonnegative");
    require(adam.lr > 0.0 && adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 &&
                adam.beta2 < 1.0 && adam.eps > 0.0,
            "invalid Adam hyperparameters");
  }

  friend bool operator==(const HashModelConfig& a, const HashModelConfig& b) {
    return a.k_bits == b.k_bits && a.image_dim == b.image_dim && a.text_dim == b.text_dim &&
           a.hidden_dim == b.hidden_dim && a.lambda_cross == b.lambda_cross &&
           a.gamma_quant == b.gamma_quant && a.batch_size == b.batch_size &&
           a.epochs == b.epochs && a.adam.lr == b.adam.lr && a.adam.beta1 == b.adam.beta1 &&
           a.adam.beta2 == b.adam.beta2 && a.adam.eps == b.adam.eps && a.seed == b.seed;
  }
};

// input -> tanh(hidden) -> tanh(k)
struct DenseEncoder {
  Matrix w1;  // hidden x input
  Vector b1;
  Matrix w2;  // k x hidden
  Vector b2;

  struct Cache {
    Matrix hidden;
    Matrix out;
  };

  struct Gradients {
    Matrix w1;
    Vector b1;
    Matrix w2;
    Vector b2;
  };

  static DenseEncoder init(int input_dim, int hidden_dim, int k_bits, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto glorot = [&rng](Eigen::Index rows, Eigen::Index cols) {
      const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
      std::uniform_real_distribution<double> u(-limit, limit);
      Matrix m(rows, cols);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
      return m;
    };
    DenseEncoder e;
    e.w1 = glorot(hidden_dim, input_dim);
    e.b1 = Vector::Zero(hidden_dim);
    e.w2 = glorot(k_bits, hidden_dim);
    e.b2 = Vector::Zero(k_bits);
    return e;
  }

  Eigen::Index input_dim() const { return w1.cols(); }
  Eigen::Index k_bits() const { return w2.rows(); }

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const {
    require(x.cols() == input_dim(), "encoder input has " + std::to_string(x.cols()) +
                                         " columns, expected " + std::to_string(input_dim()));
    Matrix hidden = ((x * w1.transpose()).rowwise() + b1.transpose()).array().tanh();
    Matrix out = ((hidden * w2.transpose()).rowwise() + b2.transpose()).array().tanh();
    if (cache != nullptr) {
      cache->hidden = hidden;
      cache->out = out;
    }
    return out;
  }

  Gradients backward(const Matrix& x, const Cache& cache, const Matrix& grad_out) const {
    Gradients g;
    const Matrix dz2 = grad_out.array() * (1.0 - cache.out.array().square());
    g.w2 = dz2.transpose() * cache.hidden;
    g.b2 = dz2.colwise().sum().transpose();
    const Matrix dh = dz2 * w2;
    const Matrix dz1 = dh.array() * (1.0 - cache.hidden.array().square());
    g.w1 = dz1.transpose() * x;
    g.b1 = dz1.colwise().sum().transpose();
    return g;
  }

  friend bool operator==(const DenseEncoder& a, const DenseEncoder& b) {
    return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
  }
};

struct HashModel {
  HashModelConfig config;
  DenseEncoder image;
  DenseEncoder text;

  Matrix encode(const Matrix& features, Modality modality) const {
    return modality == Modality::kImage ? image.forward(features) : text.forward(features);
  }

  friend bool operator==(const HashModel&, const HashModel&) = default;
};

inline HashModel init_model(const HashModelConfig& config) {
  config.validate();
  HashModel model;
  model.config = config;
  model.image = DenseEncoder::init(config.image_dim, config.hidden_dim, config.k_bits,
                                   derive_seed(config.seed, "init-image"));
  model.text = DenseEncoder::init(config.text_dim, config.hidden_dim, config.k_bits,
                                  derive_seed(config.seed, "init-text"));
  return model;
}

// Row-major n x k matrix of +1/-1 entries.
struct CodeMatrix {
  std::size_t rows = 0;
  std::size_t k = 0;
  std::vector<std::int8_t> bits;

  std::span<const std::int8_t> row(std::size_t i) const { return {bits.data() + i * k, k}; }
  std::int8_t at(std::size_t i, std::size_t b) const { return bits[i * k + b]; }

  friend bool operator==(const CodeMatrix&, const CodeMatrix&) = default;
};

// sign with sign(0) = +1.
inline CodeMatrix binarize(const Matrix& embeddings) {
  CodeMatrix codes;
  codes.rows = static_cast<std::size_t>(embeddings.rows());
  codes.k = static_cast<std::size_t>(embeddings.cols());
  codes.bits.resize(codes.rows * codes.k);
  for (std::size_t i = 0; i < codes.rows; ++i)
    for (std::size_t b = 0; b < codes.k; ++b)
      codes.bits[i * codes.k + b] = embeddings(i, b) >= 0.0 ? 1 : -1;
  return codes;
}

inline CodeMatrix binarize(const HashModel& model, const Matrix& features, Modality modality) {
  return binarize(model.encode(features, modality));
}

// S(u, v) = (u.v / K + 1) / 2
inline double similarity_S(std::span<const double> u, std::span<const double> v) {
  require(u.size() == v.size(), "similarity_S: length mismatch");
  require(!u.empty(), "similarity_S: empty vectors");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return 0.5 * (dot / static_cast<double>(u.size()) + 1.0);
}

struct HolisticLoss {
  double loss = 0.0;
  double quantization = 0.0;
  Matrix grad_u;
  Matrix grad_v;
};

// Sum over all ordered batch pairs (i, j), diagonal included, of the image,
// text and lambda-weighted cross-modal squared deviations from the target,
// plus gamma * sum_i (|| |u_i| - 1 ||^2 + || |v_i| - 1 ||^2).
inline HolisticLoss holistic_loss(const Matrix& u, const Matrix& v, const Matrix& target,
                                  double lambda_cross, double gamma_quant) {
  const auto b = u.rows();
  const auto k = u.cols();
  require(b >= 1 && k >= 1, "holistic_loss: empty batch");
  require(v.rows() == b && v.cols() == k, "holistic_loss: image/text shape mismatch");
  require(target.rows() == b && target.cols() == b, "holistic_loss: target block shape mismatch");
  require(lambda_cross >= 0.0 && gamma_quant >= 0.0, "holistic_loss: negative weight");
  const double inv_k = 1.0 / static_cast<double>(k);

  // Residual blocks r = S - target, built in place from the Gram products.
  auto residual = [&](const Matrix& a, const Matrix& c) {
    Matrix r(b, b);
    r.noalias() = a * c.transpose();
    r.array() = 0.5 * inv_k * r.array() + (0.5 - target.array());
    return r;
  };
  const Matrix r_uu = residual(u, u);
  const Matrix r_vv = residual(v, v);
  const Matrix r_uv = residual(u, v);

  HolisticLoss out;
  const double recon =
      r_uu.squaredNorm() + r_vv.squaredNorm() + lambda_cross * r_uv.squaredNorm();
  const Eigen::ArrayXXd qu = u.array().abs() - 1.0;
  const Eigen::ArrayXXd qv = v.array().abs() - 1.0;
  out.quantization = qu.square().sum() + qv.square().sum();
  out.loss = recon + gamma_quant * out.quantization;

  // d/du_i (S(u_i,u_j) - t)^2 = r u_j / K, and symmetrically for u_j.
  out.grad_u.resize(b, k);
  out.grad_u.noalias() = r_uu * u;
  out.grad_u.noalias() += r_uu.transpose() * u;
  out.grad_u.noalias() += lambda_cross * (r_uv * v);
  out.grad_u *= inv_k;
  out.grad_v.resize(b, k);
  out.grad_v.noalias() = r_vv * v;
  out.grad_v.noalias() += r_vv.transpose() * v;
  out.grad_v.noalias() += lambda_cross * (r_uv.transpose() * u);
  out.grad_v *= inv_k;
  const Eigen::ArrayXXd su = u.array().sign();
  const Eigen::ArrayXXd sv = v.array().sign();
  out.grad_u.array() += 2.0 * gamma_quant * qu * su;
  out.grad_v.array() += 2.0 * gamma_quant * qv * sv;
  return out;
}

// Training features, row r belonging to dataset item ids[r].
struct TrainingData {
  std::vector<std::int64_t> ids;
  Matrix image;
  Matrix text;
};

// Sparse lookup into the released graph: diagonal reads 1, absent pairs 0.
class TargetLookup {
 public:
  explicit TargetLookup(const SanitizedGraph& g) : adjacency_(g.n_nodes) {
    for (const SanitizedEntry& e : g.entries) {
      require(e.i >= 0 && e.j >= 0 && static_cast<std::size_t>(std::max(e.i, e.j)) < g.n_nodes,
              "sanitized entry out of range");
      adjacency_[e.i].push_back(Neighbor{e.j, e.w});
      adjacency_[e.j].push_back(Neighbor{e.i, e.w});
    }
    for (auto& row : adjacency_)
      std::sort(row.begin(), row.end(), [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }

  double operator()(std::size_t a, std::size_t b) const {
    if (a == b) return 1.0;
    const auto& row = adjacency_[a];
    auto it = std::lower_bound(row.begin(), row.end(), static_cast<NodeId>(b),
                               [](const Neighbor& x, NodeId node) { return x.node < node; });
    return it != row.end() && it->node == static_cast<NodeId>(b) ? it->w : 0.0;
  }

  Matrix block(std::span<const std::size_t> batch) const {
    const auto b = static_cast<Eigen::Index>(batch.size());
    Matrix t = Matrix::Identity(b, b);
    std::vector<Eigen::Index> position(adjacency_.size(), -1);
    for (Eigen::Index r = 0; r < b; ++r) position[batch[r]] = r;
    for (Eigen::Index r = 0; r < b; ++r) {
      for (const Neighbor& nb : adjacency_[batch[r]]) {
        const Eigen::Index c = position[nb.node];
        if (c >= 0) t(r, c) = nb.w;
      }
    }
    return t;
  }

 private:
  std::vector<std::vector<Neighbor>> adjacency_;
};

struct TrainResult {
  HashModel model;
  // Mean batch loss per epoch.
  std::vector<double> loss_trace;
};

namespace internal {

inline std::array<std::span<double>, 4> parameter_views(DenseEncoder& e) {
  return {std::span<double>(e.w1.data(), e.w1.size()), std::span<double>(e.b1.data(), e.b1.size()),
          std::span<double>(e.w2.data(), e.w2.size()), std::span<double>(e.b2.data(), e.b2.size())};
}

inline std::array<std::span<const double>, 4> gradient_views(const DenseEncoder::Gradients& g) {
  return {std::span<const double>(g.w1.data(), g.w1.size()),
          std::span<const double>(g.b1.data(), g.b1.size()),
          std::span<const double>(g.w2.data(), g.w2.size()),
          std::span<const double>(g.b2.data(), g.b2.size())};
}

inline Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = m.row(rows[r]);
  return out;
}

}  // namespace internal

// Distills a released graph into a hash model. The only graph input is the
// sanitized release; no raw-graph parameter exists by construction.
inline TrainResult train(const TrainingData& data, const SanitizedGraph& sanitized,
                         const HashModelConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(data.image.rows());
  require(static_cast<std::size_t>(data.text.rows()) == n, "image/text row counts differ");
  require(data.ids.size() == n, "training ids do not match feature rows");
  require(n >= 1, "training set is empty");
  require(data.image.cols() == config.image_dim, "image feature dimension mismatch");
  require(data.text.cols() == config.text_dim, "text feature dimension mismatch");
  if (sanitized.n_nodes != n) {
    throw InvalidArgument("sanitized graph has " + std::to_string(sanitized.n_nodes) +
                          " nodes but the training set has " + std::to_string(n) + " items");
  }
  if (!sanitized.node_ids.empty() && sanitized.node_ids != data.ids)
    throw InvalidArgument("training ids are not aligned with the sanitized graph's node ids");

  TrainResult result;
  result.model = init_model(config);
  HashModel& model = result.model;
  const TargetLookup targets(sanitized);

  std::array<AdamState, 8> adam{};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(config.seed, "batches"));
  const auto batch = static_cast<std::size_t>(config.batch_size);

  DenseEncoder::Cache cache_u, cache_v;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::span<const std::size_t> idx(order.data() + start, std::min(batch, n - start));
      const Matrix x = internal::gather_rows(data.image, idx);
      const Matrix y = internal::gather_rows(data.text, idx);
      const Matrix u = model.image.forward(x, &cache_u);
      const Matrix v = model.text.forward(y, &cache_v);
      const HolisticLoss loss =
          holistic_loss(u, v, targets.block(idx), config.lambda_cross, config.gamma_quant);
      const auto gi = model.image.backward(x, cache_u, loss.grad_u);
      const auto gt = model.text.backward(y, cache_v, loss.grad_v);
      auto pi = internal::parameter_views(model.image);
      auto pt = internal::parameter_views(model.text);
      const auto dgi = internal::gradient_views(gi);
      const auto dgt = internal::gradient_views(gt);
      for (std::size_t t = 0; t < 4; ++t) {
        adam_step(pi[t], dgi[t], adam[t], config.adam);
        adam_step(pt[t], dgt[t], adam[4 + t], config.adam);
      }
      epoch_loss += loss.loss;
      ++batches;
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(batches));
  }
  return result;
}

}  // namespace motifdp

#endif  // MOTIFDP_HASHING_HPP_
