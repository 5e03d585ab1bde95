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

// JSON forms of every configuration and report type. Parsing starts from the
// defaults and applies only the keys present; unknown keys are rejected.

#ifndef MOTIFDP_CONFIG_HPP_
#define MOTIFDP_CONFIG_HPP_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <set>
#include <string>

#include "motifdp/dataset.hpp"
#include "motifdp/error.hpp"
#include "motifdp/hashing.hpp"
#include "motifdp/seed.hpp"
#include "motifdp/synthesis.hpp"

namespace motifdp {

using Json = nlohmann::json;

struct GraphConfig {
  int d_max = 100;
  double w_floor = 0.0;
};

struct EvalConfig {
  int k_cutoff = 50;
  // "clipped" or "raw" reference graph for the triangle count error.
  std::string tce_reference = "clipped";
};

// Merged configuration for every phase. Phase seeds are derived from `seed`.
struct RunConfig {
  SyntheticConfig data;
  double query_fraction = 0.1;
  GraphConfig graph;
  SynthesisConfig synthesis;
  HashModelConfig hash;
  EvalConfig eval;
  std::uint64_t seed = 0;
  std::string output_dir = "run";

  // Copy with per-phase seeds and feature dimensions filled in.
  RunConfig resolved() const {
    RunConfig r = *this;
    r.data.seed = derive_seed(seed, "data");
    r.synthesis.seed = derive_seed(seed, "synthesis");
    r.hash.seed = derive_seed(seed, "distill");
    r.hash.image_dim = data.image_dim;
    r.hash.text_dim = data.text_dim;
    return r;
  }

  std::uint64_t split_seed() const { return derive_seed(seed, "split"); }
};

namespace internal {

inline void reject_unknown(const Json& j, const std::set<std::string>& known,
                           const std::string& where) {
  require(j.is_object(), where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw InvalidArgument("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace internal

inline Json to_json(const SyntheticConfig& c) {
  return {{"n_items", c.n_items},       {"n_communities", c.n_communities},
          {"image_dim", c.image_dim},   {"text_dim", c.text_dim},
          {"noise", c.noise},           {"text_noise", c.text_noise},
          {"offset", c.offset},         {"hub_fraction", c.hub_fraction},
          {"hub_spread", c.hub_spread}, {"seed", c.seed}};
}

inline void from_json(const Json& j, SyntheticConfig& c) {
  internal::reject_unknown(j,
                           {"n_items", "n_communities", "image_dim", "text_dim", "noise",
                            "text_noise", "offset", "hub_fraction", "hub_spread", "seed"},
                           "data config");
  internal::read(j, "n_items", c.n_items);
  internal::read(j, "n_communities", c.n_communities);
  internal::read(j, "image_dim", c.image_dim);
  internal::read(j, "text_dim", c.text_dim);
  internal::read(j, "noise", c.noise);
  internal::read(j, "text_noise", c.text_noise);
  internal::read(j, "offset", c.offset);
  internal::read(j, "hub_fraction", c.hub_fraction);
  internal::read(j, "hub_spread", c.hub_spread);
  internal::read(j, "seed", c.seed);
}

inline Json to_json(const SynthesisConfig& c) {
  Json j = {{"epsilon", c.epsilon},
            {"delta", c.delta},
            {"t_steps", c.t_steps},
            {"eta", c.eta},
            {"schedule", to_string(c.schedule)},
            {"lambda_reg", c.lambda_reg},
            {"w_max", c.w_max},
            {"w_init", c.w_init},
            {"w_pos_floor", c.w_pos_floor},
            {"delta2_override", nullptr},
            {"calib_constant", c.calib_constant},
            {"pad_factor", c.pad_factor},
            {"audit_noiseless", c.audit_noiseless},
            {"seed", c.seed}};
  if (c.delta2_override) j["delta2_override"] = *c.delta2_override;
  return j;
}

inline void from_json(const Json& j, SynthesisConfig& c) {
  internal::reject_unknown(
      j,
      {"epsilon", "delta", "t_steps", "eta", "schedule", "lambda_reg", "w_max", "w_init",
       "w_pos_floor", "delta2_override", "calib_constant", "pad_factor", "audit_noiseless", "seed"},
      "synthesis config");
  internal::read(j, "epsilon", c.epsilon);
  internal::read(j, "delta", c.delta);
  internal::read(j, "t_steps", c.t_steps);
  internal::read(j, "eta", c.eta);
  if (j.contains("schedule")) c.schedule = step_schedule_from_string(j.at("schedule").get<std::string>());
  internal::read(j, "lambda_reg", c.lambda_reg);
  internal::read(j, "w_max", c.w_max);
  internal::read(j, "w_init", c.w_init);
  internal::read(j, "w_pos_floor", c.w_pos_floor);
  if (j.contains("delta2_override")) {
    if (j.at("delta2_override").is_null()) {
      c.delta2_override.reset();
    } else {
      double v = 0.0;
      internal::read(j, "delta2_override", v);
      c.delta2_override = v;
    }
  }
  internal::read(j, "calib_constant", c.calib_constant);
  internal::read(j, "pad_factor", c.pad_factor);
  internal::read(j, "audit_noiseless", c.audit_noiseless);
  internal::read(j, "seed", c.seed);
}

inline Json to_json(const HashModelConfig& c) {
  return {{"k_bits", c.k_bits},
          {"image_dim", c.image_dim},
          {"text_dim", c.text_dim},
          {"hidden_dim", c.hidden_dim},
          {"lambda_cross", c.lambda_cross},
          {"gamma_quant", c.gamma_quant},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"lr", c.adam.lr},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"eps_stability", c.adam.eps},
          {"seed", c.seed}};
}

inline void from_json(const Json& j, HashModelConfig& c) {
  internal::reject_unknown(j,
                           {"k_bits", "image_dim", "text_dim", "hidden_dim", "lambda_cross",
                            "gamma_quant", "batch_size", "epochs", "lr", "beta1", "beta2",
                            "eps_stability", "seed"},
                           "hash config");
  internal::read(j, "k_bits", c.k_bits);
  internal::read(j, "image_dim", c.image_dim);
  internal::read(j, "text_dim", c.text_dim);
  internal::read(j, "hidden_dim", c.hidden_dim);
  internal::read(j, "lambda_cross", c.lambda_cross);
  internal::read(j, "gamma_quant", c.gamma_quant);
  internal::read(j, "batch_size", c.batch_size);
  internal::read(j, "epochs", c.epochs);
  internal::read(j, "lr", c.adam.lr);
  internal::read(j, "beta1", c.adam.beta1);
  internal::read(j, "beta2", c.adam.beta2);
  internal::read(j, "eps_stability", c.adam.eps);
  internal::read(j, "seed", c.seed);
}

inline Json to_json(const RunConfig& c) {
  return {{"data", to_json(c.data)},
          {"query_fraction", c.query_fraction},
          {"graph", {{"d_max", c.graph.d_max}, {"w_floor", c.graph.w_floor}}},
          {"synthesis", to_json(c.synthesis)},
          {"hash", to_json(c.hash)},
          {"eval", {{"k_cutoff", c.eval.k_cutoff}, {"tce_reference", c.eval.tce_reference}}},
          {"seed", c.seed},
          {"output_dir", c.output_dir}};
}

inline void from_json(const Json& j, RunConfig& c) {
  internal::reject_unknown(
      j, {"data", "query_fraction", "graph", "synthesis", "hash", "eval", "seed", "output_dir"},
      "run config");
  if (j.contains("data")) from_json(j.at("data"), c.data);
  internal::read(j, "query_fraction", c.query_fraction);
  if (j.contains("graph")) {
    const Json& g = j.at("graph");
    internal::reject_unknown(g, {"d_max", "w_floor"}, "graph config");
    internal::read(g, "d_max", c.graph.d_max);
    internal::read(g, "w_floor", c.graph.w_floor);
  }
  if (j.contains("synthesis")) from_json(j.at("synthesis"), c.synthesis);
  if (j.contains("hash")) from_json(j.at("hash"), c.hash);
  if (j.contains("eval")) {
    const Json& e = j.at("eval");
    internal::reject_unknown(e, {"k_cutoff", "tce_reference"}, "eval config");
    internal::read(e, "k_cutoff", c.eval.k_cutoff);
    internal::read(e, "tce_reference", c.eval.tce_reference);
  }
  internal::read(j, "seed", c.seed);
  internal::read(j, "output_dir", c.output_dir);
}

inline Json to_json(const PrivacyReceipt& r) {
  return {{"epsilon", r.epsilon},
          {"delta", r.delta},
          {"t_steps", r.t_steps},
          {"delta2", r.delta2},
          {"sigma", r.sigma},
          {"d_max", r.d_max},
          {"seed", r.seed},
          {"support_mode", r.support_mode},
          {"signal_lost", r.signal_lost},
          {"audit_noiseless", r.audit_noiseless},
          {"schedule", r.schedule},
          {"eta", r.eta},
          {"lambda_reg", r.lambda_reg},
          {"w_init", r.w_init},
          {"w_pos_floor", r.w_pos_floor},
          {"w_max", r.w_max},
          {"calib_constant", r.calib_constant},
          {"pad_factor", r.pad_factor}};
}

inline PrivacyReceipt receipt_from_json(const Json& j) {
  PrivacyReceipt r;
  try {
    r.epsilon = j.at("epsilon").get<double>();
    r.delta = j.at("delta").get<double>();
    r.t_steps = j.at("t_steps").get<int>();
    r.delta2 = j.at("delta2").get<double>();
    r.sigma = j.at("sigma").get<double>();
    r.d_max = j.at("d_max").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.support_mode = j.at("support_mode").get<std::string>();
    r.signal_lost = j.at("signal_lost").get<bool>();
    r.audit_noiseless = j.value("audit_noiseless", false);
    r.schedule = j.value("schedule", std::string());
    r.eta = j.value("eta", 0.0);
    r.lambda_reg = j.value("lambda_reg", 0.0);
    r.w_init = j.value("w_init", 0.0);
    r.w_pos_floor = j.value("w_pos_floor", 0.0);
    r.w_max = j.value("w_max", 0.0);
    r.calib_constant = j.value("calib_constant", 0.0);
    r.pad_factor = j.value("pad_factor", 0.0);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed privacy receipt: ") + e.what());
  }
  return r;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Hash of every result-affecting field; the output directory is excluded.
inline std::string config_digest(const RunConfig& c) {
  Json j = to_json(c);
  j.erase("output_dir");
  return hex64(fnv1a64(j.dump()));
}

}  // namespace motifdp

#endif  // MOTIFDP_CONFIG_HPP_
