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

// Edge-private synthesis of a motif-preserving target graph: degree-bounded
// sensitivity, Gaussian noise calibration, noisy entropic mirror descent on a
// triangle-motif objective and rectified log-normalization of the result.

#ifndef MOTIFDP_SYNTHESIS_HPP_
#define MOTIFDP_SYNTHESIS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "motifdp/error.hpp"
#include "motifdp/graph.hpp"
#include "motifdp/seed.hpp"

namespace motifdp {

enum class StepSchedule {
  // eta / sqrt(sum of squared noisy gradients), per coordinate.
  kAdaGrad,
  // eta / sqrt(t), shared by all coordinates.
  kInverseSqrt,
};

inline std::string to_string(StepSchedule s) {
  return s == StepSchedule::kAdaGrad ? "adagrad" : "inverse_sqrt";
}

inline StepSchedule step_schedule_from_string(const std::string& s) {
  if (s == "adagrad") return StepSchedule::kAdaGrad;
  if (s == "inverse_sqrt") return StepSchedule::kInverseSqrt;
  throw InvalidArgument("unknown step schedule '" + s + "'");
}

struct SynthesisConfig {
  double epsilon = 2.0;
  double delta = 1e-5;
  int t_steps = 500;
  double eta = 0.5;
  StepSchedule schedule = StepSchedule::kAdaGrad;
  double lambda_reg = 0.1;
  double w_max = 1.0;
  double w_init = 0.3;
  double w_pos_floor = 1e-6;
  std::optional<double> delta2_override;
  double calib_constant = 2.0;
  double pad_factor = 1.0;
  // sigma forced to 0. The output is NOT differentially private.
  bool audit_noiseless = false;
  std::uint64_t seed = 0;

  void validate() const {
    require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be positive");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    require(t_steps >= 1, "t_steps must be at least 1");
    require(std::isfinite(eta) && eta > 0.0, "eta must be positive");
    require(std::isfinite(lambda_reg) && lambda_reg >= 0.0, "lambda_reg must be nonnegative");
    require(std::isfinite(w_max) && w_max > 0.0, "w_max must be positive");
    require(w_pos_floor > 0.0 && w_pos_floor < w_init && w_init <= w_max,
            "weights must satisfy 0 < w_pos_floor < w_init <= w_max");
    require(!delta2_override || (std::isfinite(*delta2_override) && *delta2_override >= 0.0),
            "delta2 override must be finite and nonnegative");
    require(std::isfinite(calib_constant) && calib_constant > 0.0,
            "calibration constant must be positive");
    require(std::isfinite(pad_factor) && pad_factor >= 0.0, "pad_factor must be nonnegative");
  }
};

struct PrivacyReceipt {
  double epsilon = 0.0;
  double delta = 0.0;
  int t_steps = 0;
  double delta2 = 0.0;
  double sigma = 0.0;
  int d_max = 0;
  std::uint64_t seed = 0;
  std::string support_mode;
  bool signal_lost = false;
  bool audit_noiseless = false;
  // Optimizer settings, recorded so a release can be reproduced.
  std::string schedule;
  double eta = 0.0;
  double lambda_reg = 0.0;
  double w_init = 0.0;
  double w_pos_floor = 0.0;
  double w_max = 0.0;
  double calib_constant = 0.0;
  double pad_factor = 0.0;

  friend bool operator==(const PrivacyReceipt&, const PrivacyReceipt&) = default;
};

struct SanitizedEntry {
  NodeId i = 0;
  NodeId j = 0;
  double w = 0.0;

  friend bool operator==(const SanitizedEntry&, const SanitizedEntry&) = default;
};

// Released target graph. Entries are sorted with i < j and lie in [0, 1].
// node_ids maps node index to dataset item id when known.
struct SanitizedGraph {
  std::size_t n_nodes = 0;
  std::vector<SanitizedEntry> entries;
  PrivacyReceipt receipt;
  std::vector<std::int64_t> node_ids;

  friend bool operator==(const SanitizedGraph&, const SanitizedGraph&) = default;
};

inline double sensitivity_bound(int d_max, double w_max, double lambda_reg) {
  require(d_max >= 1, "d_max must be at least 1");
  require(std::isfinite(w_max) && w_max > 0.0, "w_max must be positive");
  require(std::isfinite(lambda_reg) && lambda_reg >= 0.0, "lambda_reg must be nonnegative");
  return 4.0 * d_max * w_max * w_max + 2.0 * lambda_reg * w_max;
}

// sigma = c * delta2 * sqrt(T ln(1/delta)) / epsilon
inline double calibrate_noise(double delta2, double epsilon, double delta, int t_steps,
                              double c = 2.0) {
  require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be positive");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  require(t_steps >= 1, "t_steps must be at least 1");
  require(std::isfinite(delta2) && delta2 > 0.0, "delta2 must be positive");
  require(std::isfinite(c) && c > 0.0, "calibration constant must be positive");
  return c * delta2 * std::sqrt(static_cast<double>(t_steps) * std::log(1.0 / delta)) / epsilon;
}

// Unordered node pairs carrying synthesis weights, with per-node sorted
// neighbor lists that point back at the pair index.
class MotifSupport {
 public:
  struct Slot {
    NodeId node = 0;
    std::size_t pair = 0;
  };

  MotifSupport() = default;
  MotifSupport(std::size_t n_nodes, std::vector<std::pair<NodeId, NodeId>> pairs)
      : pairs_(std::move(pairs)), adjacency_(n_nodes) {
    for (auto& [a, b] : pairs_) {
      require(a != b, "support pair is a self loop");
      require(a >= 0 && b >= 0 && static_cast<std::size_t>(std::max(a, b)) < n_nodes,
              "support pair out of range");
      if (a > b) std::swap(a, b);
    }
    std::sort(pairs_.begin(), pairs_.end());
    require(std::adjacent_find(pairs_.begin(), pairs_.end()) == pairs_.end(),
            "duplicate support pair");
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      adjacency_[pairs_[p].first].push_back(Slot{pairs_[p].second, p});
      adjacency_[pairs_[p].second].push_back(Slot{pairs_[p].first, p});
    }
    for (auto& row : adjacency_)
      std::sort(row.begin(), row.end(), [](const Slot& x, const Slot& y) { return x.node < y.node; });
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const auto [a, b] = pairs_[p];
      for_each_common_node(a, b, [&](NodeId k, std::size_t pa, std::size_t pb) {
        if (k > b) triangles_.push_back(Triangle{p, pa, pb});
      });
    }
  }

  std::size_t n_nodes() const { return adjacency_.size(); }
  std::size_t size() const { return pairs_.size(); }
  const std::vector<std::pair<NodeId, NodeId>>& pairs() const { return pairs_; }
  std::span<const Slot> neighbors(NodeId a) const { return adjacency_[a]; }

  // Each support triangle once, as the pair indices of its three sides.
  struct Triangle {
    std::size_t ab = 0;
    std::size_t ak = 0;
    std::size_t bk = 0;
  };
  std::span<const Triangle> triangles() const { return triangles_; }

  std::optional<std::size_t> index(NodeId a, NodeId b) const {
    if (a > b) std::swap(a, b);
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair{a, b});
    if (it == pairs_.end() || *it != std::pair{a, b}) return std::nullopt;
    return static_cast<std::size_t>(it - pairs_.begin());
  }

  // Calls fn(pair_ak, pair_bk) for every common neighbor k of a and b, in
  // ascending k.
  template <typename Fn>
  void for_each_common(NodeId a, NodeId b, Fn&& fn) const {
    for_each_common_node(a, b, [&](NodeId, std::size_t pa, std::size_t pb) { fn(pa, pb); });
  }

 private:
  template <typename Fn>
  void for_each_common_node(NodeId a, NodeId b, Fn&& fn) const {
    const auto ra = neighbors(a);
    const auto rb = neighbors(b);
    auto x = ra.begin();
    auto y = rb.begin();
    while (x != ra.end() && y != rb.end()) {
      if (x->node < y->node) {
        ++x;
      } else if (y->node < x->node) {
        ++y;
      } else {
        fn(x->node, x->pair, y->pair);
        ++x;
        ++y;
      }
    }
  }

  std::vector<std::pair<NodeId, NodeId>> pairs_;
  std::vector<std::vector<Slot>> adjacency_;
  std::vector<Triangle> triangles_;
};

// tau_p = sum over common support neighbors k of w_ak * w_bk.
inline std::vector<double> motif_mass(const MotifSupport& support, std::span<const double> w) {
  require(w.size() == support.size(), "weight vector does not match support");
  std::vector<double> tau(support.size(), 0.0);
  for (const auto& t : support.triangles()) {
    tau[t.ab] += w[t.ak] * w[t.bk];
    tau[t.ak] += w[t.ab] * w[t.bk];
    tau[t.bk] += w[t.ab] * w[t.ak];
  }
  return tau;
}

// L(W) = 1/2 sum_p (tau_p(W) - t_p)^2 + lambda_reg sum_p (W_p - A_p)^2 over a
// fixed support. Targets are the motif mass of the center graph A.
struct MotifProblem {
  MotifSupport support;
  std::vector<double> targets;
  std::vector<double> center;
  double lambda_reg = 0.0;

  double evaluate(std::span<const double> w, std::vector<double>* gradient = nullptr) const {
    require(w.size() == support.size(), "weight vector does not match support");
    const std::vector<double> tau = motif_mass(support, w);
    std::vector<double> residual(tau.size());
    double loss = 0.0;
    for (std::size_t p = 0; p < tau.size(); ++p) {
      residual[p] = tau[p] - targets[p];
      const double dev = w[p] - center[p];
      loss += 0.5 * residual[p] * residual[p] + lambda_reg * dev * dev;
    }
    if (gradient != nullptr) {
      std::vector<double>& g = *gradient;
      g.assign(support.size(), 0.0);
      for (const auto& t : support.triangles()) {
        g[t.ab] += residual[t.ak] * w[t.bk] + residual[t.bk] * w[t.ak];
        g[t.ak] += residual[t.ab] * w[t.bk] + residual[t.bk] * w[t.ab];
        g[t.bk] += residual[t.ab] * w[t.ak] + residual[t.ak] * w[t.ab];
      }
      for (std::size_t p = 0; p < support.size(); ++p)
        g[p] += 2.0 * lambda_reg * (w[p] - center[p]);
    }
    return loss;
  }
};

inline MotifProblem make_motif_problem(const SparseWeightedGraph& center_graph,
                                       MotifSupport support, double lambda_reg) {
  require(center_graph.n_nodes() == support.n_nodes(), "support and graph differ in size");
  require(std::isfinite(lambda_reg) && lambda_reg >= 0.0, "lambda_reg must be nonnegative");
  MotifProblem problem;
  problem.center.assign(support.size(), 0.0);
  for (const Edge& e : center_graph.edges()) {
    auto p = support.index(e.i, e.j);
    if (!p) {
      throw InvalidArgument("support mismatch: edge (" + std::to_string(e.i) + "," +
                            std::to_string(e.j) + ") of the target graph is not supported");
    }
    problem.center[*p] = e.w;
  }
  problem.targets = motif_mass(support, problem.center);
  problem.support = std::move(support);
  problem.lambda_reg = lambda_reg;
  return problem;
}

namespace internal {

inline MotifSupport support_of(const SparseWeightedGraph& g) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (const Edge& e : g.edges()) pairs.emplace_back(e.i, e.j);
  return MotifSupport(g.n_nodes(), std::move(pairs));
}

inline std::vector<double> weights_of(const SparseWeightedGraph& g) {
  std::vector<double> w;
  for (const Edge& e : g.edges()) w.push_back(e.w);
  return w;
}

}  // namespace internal

// Objective with W's edge set as the support; every edge of A must be in it.
inline double motif_objective(const SparseWeightedGraph& w, const SparseWeightedGraph& a,
                              double lambda_reg) {
  const MotifProblem problem = make_motif_problem(a, internal::support_of(w), lambda_reg);
  return problem.evaluate(internal::weights_of(w));
}

// Gradient in the order of w.edges().
inline std::vector<double> motif_gradient(const SparseWeightedGraph& w,
                                          const SparseWeightedGraph& a, double lambda_reg) {
  const MotifProblem problem = make_motif_problem(a, internal::support_of(w), lambda_reg);
  std::vector<double> g;
  problem.evaluate(internal::weights_of(w), &g);
  return g;
}

// Entropic mirror step: w <- clamp(w * exp(-step_p * g_p), [floor, w_max]).
inline void mirror_descent_step(std::span<double> w, std::span<const double> noisy_grad,
                                std::span<const double> step, double w_pos_floor, double w_max) {
  require(w.size() == noisy_grad.size() && w.size() == step.size(),
          "mirror step operands differ in length");
  for (std::size_t p = 0; p < noisy_grad.size(); ++p) {
    if (!std::isfinite(noisy_grad[p]))
      throw InvalidArgument("non-finite gradient entry at coordinate " + std::to_string(p));
  }
  for (std::size_t p = 0; p < w.size(); ++p)
    w[p] = std::clamp(w[p] * std::exp(-step[p] * noisy_grad[p]), w_pos_floor, w_max);
}

inline void mirror_descent_step(std::span<double> w, std::span<const double> noisy_grad,
                                double eta, double w_pos_floor, double w_max) {
  require(std::isfinite(eta) && eta >= 0.0, "eta must be nonnegative");
  const std::vector<double> step(w.size(), eta);
  mirror_descent_step(w, noisy_grad, step, w_pos_floor, w_max);
}

struct Rectified {
  std::vector<double> values;
  bool signal_lost = false;
};

// log(1 + max(0, x)) / max log(1 + max(0, x)); all zeros if nothing survives.
inline Rectified rectified_log_normalize(std::span<const double> raw) {
  Rectified out;
  out.values.resize(raw.size(), 0.0);
  double peak = 0.0;
  for (std::size_t p = 0; p < raw.size(); ++p) {
    require(std::isfinite(raw[p]), "rectified_log_normalize needs finite input");
    out.values[p] = std::log1p(std::max(0.0, raw[p]));
    peak = std::max(peak, out.values[p]);
  }
  if (peak <= 0.0) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.signal_lost = true;
    return out;
  }
  for (double& v : out.values) v /= peak;
  return out;
}

// Support = clipped edges plus round(pad_factor * |E|) uniformly random
// data-independent pairs.
inline MotifSupport padded_support(const SparseWeightedGraph& graph, double pad_factor,
                                   std::uint64_t seed) {
  const std::size_t n = graph.n_nodes();
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::unordered_set<std::uint64_t> taken;
  for (const Edge& e : graph.edges()) {
    pairs.emplace_back(e.i, e.j);
    taken.insert(static_cast<std::uint64_t>(e.i) * n + e.j);
  }
  const std::size_t all_pairs = n * (n - 1) / 2;
  const auto wanted = static_cast<std::size_t>(std::llround(pad_factor * pairs.size()));
  const std::size_t pad = std::min(wanted, all_pairs - pairs.size());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n) - 1);
  for (std::size_t added = 0; added < pad;) {
    NodeId a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!taken.insert(static_cast<std::uint64_t>(a) * n + b).second) continue;
    pairs.emplace_back(a, b);
    ++added;
  }
  return MotifSupport(n, std::move(pairs));
}

// Optional diagnostics for a synthesis run.
struct SynthesisTrace {
  // Noiseless objective at W^0 .. W^T.
  std::vector<double> objective;
  std::vector<std::pair<NodeId, NodeId>> support;
  // W^T before rectification, aligned with support.
  std::vector<double> raw_weights;
};

inline std::string support_mode_label(double pad_factor) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "clipped+random_pad(%.17g)", pad_factor);
  return buf;
}

inline SanitizedGraph synthesize(const ClippedGraph& clipped, const SynthesisConfig& config,
                                 SynthesisTrace* trace = nullptr) {
  config.validate();
  require(clipped.d_max >= 1, "clipped graph has no degree bound");
  ensure(clipped.max_degree() <= static_cast<std::size_t>(clipped.d_max),
         "input graph violates its degree bound");
  require(clipped.graph.w_max() <= config.w_max, "graph weights exceed the configured w_max");
  const double delta2 = config.delta2_override
                            ? *config.delta2_override
                            : sensitivity_bound(clipped.d_max, config.w_max, config.lambda_reg);
  require(delta2 > 0.0, "refusing to synthesize with a nonpositive sensitivity bound");
  const double calibrated = calibrate_noise(delta2, config.epsilon, config.delta, config.t_steps,
                                            config.calib_constant);
  const double sigma = config.audit_noiseless ? 0.0 : calibrated;

  const std::size_t n = clipped.graph.n_nodes();
  const MotifProblem problem = make_motif_problem(
      clipped.graph,
      padded_support(clipped.graph, config.pad_factor, derive_seed(config.seed, "support-padding")),
      config.lambda_reg);
  const std::size_t dim = problem.support.size();

  std::vector<double> w(dim, config.w_init);
  std::vector<double> grad;
  std::vector<double> sum_sq(dim, 0.0);
  std::vector<double> step(dim, 0.0);
  std::mt19937_64 rng(derive_seed(config.seed, "synthesis-noise"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (trace != nullptr) trace->objective.clear();

  for (int t = 1; t <= config.t_steps; ++t) {
    const double loss = problem.evaluate(w, &grad);
    if (trace != nullptr) trace->objective.push_back(loss);
    if (sigma > 0.0) {
      for (double& g : grad) g += sigma * gauss(rng);
    }
    switch (config.schedule) {
      case StepSchedule::kAdaGrad:
        for (std::size_t p = 0; p < dim; ++p) {
          sum_sq[p] += grad[p] * grad[p];
          step[p] = sum_sq[p] > 0.0 ? config.eta / std::sqrt(sum_sq[p]) : 0.0;
        }
        break;
      case StepSchedule::kInverseSqrt:
        std::fill(step.begin(), step.end(), config.eta / std::sqrt(static_cast<double>(t)));
        break;
    }
    mirror_descent_step(w, grad, step, config.w_pos_floor, config.w_max);
  }
  if (trace != nullptr) {
    trace->objective.push_back(problem.evaluate(w));
    trace->support = problem.support.pairs();
    trace->raw_weights = w;
  }

  const Rectified released = rectified_log_normalize(w);
  SanitizedGraph out;
  out.n_nodes = n;
  out.entries.reserve(dim);
  for (std::size_t p = 0; p < dim; ++p) {
    const auto [a, b] = problem.support.pairs()[p];
    out.entries.push_back(SanitizedEntry{a, b, released.values[p]});
  }
  PrivacyReceipt& r = out.receipt;
  r.epsilon = config.epsilon;
  r.delta = config.delta;
  r.t_steps = config.t_steps;
  r.delta2 = delta2;
  r.sigma = sigma;
  r.d_max = clipped.d_max;
  r.seed = config.seed;
  r.support_mode = support_mode_label(config.pad_factor);
  r.signal_lost = released.signal_lost;
  r.audit_noiseless = config.audit_noiseless;
  r.schedule = to_string(config.schedule);
  r.eta = config.eta;
  r.lambda_reg = config.lambda_reg;
  r.w_init = config.w_init;
  r.w_pos_floor = config.w_pos_floor;
  r.w_max = config.w_max;
  r.calib_constant = config.calib_constant;
  r.pad_factor = config.pad_factor;
  return out;
}

// True when the receipt's sigma is exactly what its own parameters calibrate to.
inline bool receipt_consistent(const PrivacyReceipt& r) {
  if (r.audit_noiseless) return r.sigma == 0.0;
  return r.sigma == calibrate_noise(r.delta2, r.epsilon, r.delta, r.t_steps, r.calib_constant);
}

struct SensitivityAudit {
  double observed_max = 0.0;
  double delta2 = 0.0;
  bool pass = false;
  std::size_t neighbors_checked = 0;
  std::string worst_case;
};

inline constexpr std::size_t kAuditNodeLimit = 16;

// Exhaustive single-edge neighbor enumeration. For each neighboring graph A'
// the data-dependent gradient is evaluated at the fixed point W = w_max on the
// union of both edge sets, and the L2 change is compared against delta2.
inline SensitivityAudit empirical_sensitivity_audit(const ClippedGraph& graph,
                                                    const SynthesisConfig& config) {
  const std::size_t n = graph.graph.n_nodes();
  require(n <= kAuditNodeLimit,
          "sensitivity audit is limited to " + std::to_string(kAuditNodeLimit) + " nodes");
  require(graph.d_max >= 1, "audit needs a degree bound");
  require(config.w_max > 0.0, "w_max must be positive");
  require(config.lambda_reg >= 0.0, "lambda_reg must be nonnegative");

  SensitivityAudit report;
  report.delta2 = config.delta2_override
                      ? *config.delta2_override
                      : sensitivity_bound(graph.d_max, config.w_max, config.lambda_reg);

  const SparseWeightedGraph& base = graph.graph;
  const auto d_max = static_cast<std::size_t>(graph.d_max);
  const double cap = std::min(config.w_max, base.w_max());

  auto measure = [&](const SparseWeightedGraph& neighbor, const std::string& label) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (const Edge& e : base.edges()) pairs.emplace_back(e.i, e.j);
    for (const Edge& e : neighbor.edges())
      if (!base.has_edge(e.i, e.j)) pairs.emplace_back(e.i, e.j);
    MotifSupport support(n, pairs);
    const std::vector<double> w(support.size(), config.w_max);
    std::vector<double> g0, g1;
    make_motif_problem(base, support, config.lambda_reg).evaluate(w, &g0);
    make_motif_problem(neighbor, support, config.lambda_reg).evaluate(w, &g1);
    double sq = 0.0;
    for (std::size_t p = 0; p < g0.size(); ++p) sq += (g0[p] - g1[p]) * (g0[p] - g1[p]);
    const double change = std::sqrt(sq);
    ++report.neighbors_checked;
    if (change > report.observed_max || report.worst_case.empty()) {
      report.observed_max = change;
      report.worst_case = label;
    }
  };

  for (NodeId a = 0; a < static_cast<NodeId>(n); ++a) {
    for (NodeId b = a + 1; b < static_cast<NodeId>(n); ++b) {
      const std::string pair = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
      if (base.has_edge(a, b)) {
        SparseWeightedGraph removed = base;
        removed.remove_edge(a, b);
        measure(removed, "remove " + pair);
        if (base.weight(a, b) < cap) {
          SparseWeightedGraph raised = base;
          raised.set_weight(a, b, cap);
          measure(raised, "raise " + pair);
        }
      } else if (base.degree(a) < d_max && base.degree(b) < d_max) {
        SparseWeightedGraph added = base;
        added.add_edge(a, b, cap);
        measure(added, "add " + pair);
      }
    }
  }
  report.pass = report.observed_max <= report.delta2;
  return report;
}

}  // namespace motifdp

#endif  // MOTIFDP_SYNTHESIS_HPP_
