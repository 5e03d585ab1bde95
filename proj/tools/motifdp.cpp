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

// Command line front end: gen-data, build-graph, synthesize, distill,
// evaluate, sweep, audit-sensitivity and pipeline.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 usage error,
// 3 invariant violation.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "motifdp/motifdp.hpp"

namespace fs = std::filesystem;
using namespace motifdp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

// Flag values are collected during parsing and applied on top of the
// --config file afterwards, so flags always win regardless of their order.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& name, std::function<void(RunConfig&, T)> apply,
                   const std::string& help) {
    return app->add_option_function<T>(
        name, [this, apply](const T& v) { pending_.push_back([apply, v](RunConfig& c) { apply(c, v); }); },
        help);
  }

  void apply(RunConfig& c) const {
    for (const auto& f : pending_) f(c);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> pending_;
};

struct Common {
  std::string config_path;
  Overrides overrides;

  RunConfig load() const {
    RunConfig c;
    if (!config_path.empty()) from_json(read_json_file(config_path), c);
    overrides.apply(c);
    return c;
  }
};

void add_config_option(CLI::App* app, Common& common) {
  app->add_option("--config", common.config_path, "JSON run configuration; flags override it")
      ->check(CLI::ExistingFile);
}

void add_seed_option(CLI::App* app, Common& common) {
  common.overrides.add<std::uint64_t>(app, "--seed", [](RunConfig& c, std::uint64_t v) { c.seed = v; },
                                      "global seed");
}

void add_data_options(CLI::App* app, Common& common) {
  auto& o = common.overrides;
  o.add<int>(app, "--n", [](RunConfig& c, int v) { c.data.n_items = v; }, "number of items");
  o.add<int>(app, "--communities", [](RunConfig& c, int v) { c.data.n_communities = v; },
             "number of planted communities");
  o.add<int>(app, "--image-dim", [](RunConfig& c, int v) { c.data.image_dim = v; }, "image feature dimension");
  o.add<int>(app, "--text-dim", [](RunConfig& c, int v) { c.data.text_dim = v; }, "text feature dimension");
  o.add<double>(app, "--noise", [](RunConfig& c, double v) { c.data.noise = v; }, "image feature noise");
  o.add<double>(app, "--text-noise", [](RunConfig& c, double v) { c.data.text_noise = v; }, "text feature noise");
  o.add<double>(app, "--hub-fraction", [](RunConfig& c, double v) { c.data.hub_fraction = v; },
                "fraction of hub items");
  o.add<double>(app, "--query-fraction", [](RunConfig& c, double v) { c.query_fraction = v; },
                "held-out query fraction");
}

void add_graph_options(CLI::App* app, Common& common) {
  auto& o = common.overrides;
  o.add<int>(app, "--dmax", [](RunConfig& c, int v) { c.graph.d_max = v; }, "degree clipping threshold");
  o.add<double>(app, "--w-floor", [](RunConfig& c, double v) { c.graph.w_floor = v; },
                "minimum similarity for a candidate neighbor");
}

void add_synthesis_options(CLI::App* app, Common& common) {
  auto& o = common.overrides;
  o.add<double>(app, "--epsilon", [](RunConfig& c, double v) { c.synthesis.epsilon = v; }, "privacy epsilon");
  o.add<double>(app, "--delta", [](RunConfig& c, double v) { c.synthesis.delta = v; }, "privacy delta");
  o.add<int>(app, "--steps", [](RunConfig& c, int v) { c.synthesis.t_steps = v; }, "mirror descent steps T");
  o.add<double>(app, "--eta", [](RunConfig& c, double v) { c.synthesis.eta = v; }, "base step size");
  o.add<std::string>(
      app, "--schedule",
      [](RunConfig& c, std::string v) { c.synthesis.schedule = step_schedule_from_string(v); },
      "step schedule: adagrad or inverse_sqrt");
  o.add<double>(app, "--lambda-reg", [](RunConfig& c, double v) { c.synthesis.lambda_reg = v; },
                "quadratic regularizer weight");
  o.add<double>(app, "--w-init", [](RunConfig& c, double v) { c.synthesis.w_init = v; }, "initial weight");
  o.add<double>(app, "--pad-factor", [](RunConfig& c, double v) { c.synthesis.pad_factor = v; },
                "random padding pairs per clipped edge");
  o.add<double>(app, "--delta2", [](RunConfig& c, double v) { c.synthesis.delta2_override = v; },
                "override the sensitivity bound");
}

void add_hash_options(CLI::App* app, Common& common) {
  auto& o = common.overrides;
  o.add<int>(app, "--bits", [](RunConfig& c, int v) { c.hash.k_bits = v; }, "code length K (16, 32, 64)");
  o.add<int>(app, "--epochs", [](RunConfig& c, int v) { c.hash.epochs = v; }, "training epochs");
  o.add<double>(app, "--lr", [](RunConfig& c, double v) { c.hash.adam.lr = v; }, "Adam learning rate");
  o.add<int>(app, "--batch", [](RunConfig& c, int v) { c.hash.batch_size = v; }, "batch size");
  o.add<int>(app, "--hidden", [](RunConfig& c, int v) { c.hash.hidden_dim = v; }, "encoder hidden width");
  o.add<double>(app, "--lambda-cross", [](RunConfig& c, double v) { c.hash.lambda_cross = v; },
                "cross-modal loss weight");
  o.add<double>(app, "--gamma", [](RunConfig& c, double v) { c.hash.gamma_quant = v; },
                "quantization loss weight");
}

void add_eval_options(CLI::App* app, Common& common) {
  auto& o = common.overrides;
  o.add<int>(app, "--k", [](RunConfig& c, int v) { c.eval.k_cutoff = v; }, "mAP cutoff");
  o.add<std::string>(app, "--tce-reference", [](RunConfig& c, std::string v) { c.eval.tce_reference = v; },
                     "reference graph for TCE: clipped or raw");
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// The merged configuration lands next to every output.
void write_effective_config(const fs::path& output, const RunConfig& c) {
  const fs::path target = fs::is_directory(output) ? output / "config.json"
                                                   : fs::path(output.string() + ".config.json");
  write_json_file(target, to_json(c));
}

void print_receipt(const PrivacyReceipt& r) {
  if (r.audit_noiseless) {
    std::cout << "*** NOT PRIVATE: noiseless audit run (sigma = 0); do not release ***\n";
  }
  std::printf("epsilon=%g delta=%g T=%d delta2=%.6g sigma=%.6g d_max=%d support=%s signal_lost=%s\n",
              r.epsilon, r.delta, r.t_steps, r.delta2, r.sigma, r.d_max, r.support_mode.c_str(),
              r.signal_lost ? "true" : "false");
}

// ---------------------------------------------------------------------------

struct GenData {
  Common common;
  std::string out;
};

int run_gen_data(const GenData& a) {
  const RunConfig c = a.common.load();
  const RunConfig rc = c.resolved();
  const MultimodalDataset ds =
      inductive_split(generate_synthetic(rc.data), rc.query_fraction, rc.split_seed());
  fs::create_directories(a.out);
  save_features(fs::path(a.out) / "features.csv", ds.items);
  save_split(fs::path(a.out) / "split.json", ds.split);
  write_effective_config(a.out, c);
  std::cout << "items=" << ds.items.size() << " train=" << ds.split.train.size()
            << " query=" << ds.split.query.size() << "\n";
  return kExitOk;
}

struct BuildGraph {
  Common common;
  std::string features, split, out;
};

int run_build_graph(const BuildGraph& a) {
  const RunConfig c = a.common.load();
  const FeatureTable all = load_features(a.features);
  const Split split = load_split(a.split);
  check_no_query_leakage(split.train, split.query);
  const FeatureTable train_items = select_items(all, split.train);
  const ClippedGraph g = clipped_training_graph(train_items, c.graph);
  ensure(g.max_degree() <= static_cast<std::size_t>(g.d_max), "clipped graph violates its degree bound");
  ensure_parent(a.out);
  save_graph(a.out, g);
  save_node_ids(ids_sidecar(a.out), train_items.ids);
  write_effective_config(a.out, c);
  std::cout << "nodes=" << g.graph.n_nodes() << " edges=" << g.graph.n_edges()
            << " max_degree=" << g.max_degree() << " dmax=" << g.d_max << "\n";
  return kExitOk;
}

struct Synthesize {
  Common common;
  std::string graph, out;
  bool audit_noiseless = false;
};

int run_synthesize(const Synthesize& a) {
  RunConfig c = a.common.load();
  if (a.audit_noiseless) c.synthesis.audit_noiseless = true;
  const RunConfig rc = c.resolved();
  const ClippedGraph g = load_graph(a.graph);
  SanitizedGraph s = synthesize(g, rc.synthesis);
  if (fs::exists(ids_sidecar(a.graph))) s.node_ids = load_node_ids(ids_sidecar(a.graph));
  ensure(s.node_ids.empty() || s.node_ids.size() == s.n_nodes, "node id sidecar does not match the graph");
  ensure(receipt_consistent(s.receipt), "receipt sigma disagrees with its calibration");
  ensure_parent(a.out);
  save_sanitized(a.out, s);
  write_effective_config(a.out, c);
  print_receipt(s.receipt);
  return kExitOk;
}

// Takes features and a sanitized graph only; there is deliberately no way to
// hand this command the clipped graph.
struct Distill {
  Common common;
  std::string features, sanitized, out;
};

int run_distill(const Distill& a) {
  const RunConfig c = a.common.load();
  RunConfig rc = c.resolved();
  const FeatureTable all = load_features(a.features);
  const SanitizedGraph s = load_sanitized(a.sanitized);
  require(!s.node_ids.empty(), "sanitized graph carries no node ids; cannot align it with features");
  const FeatureTable train_items = select_items(all, s.node_ids);
  rc.hash.image_dim = static_cast<int>(all.image.cols());
  rc.hash.text_dim = static_cast<int>(all.text.cols());
  const TrainResult r = train(training_data(train_items), s, rc.hash);

  fs::create_directories(a.out);
  const fs::path dir(a.out);
  save_model(dir / "model.json", r.model);
  save_codes(dir / "codes_image.tsv", {all.ids, binarize(r.model, all.image, Modality::kImage)});
  save_codes(dir / "codes_text.tsv", {all.ids, binarize(r.model, all.text, Modality::kText)});
  Json trace = Json::array();
  for (double v : r.loss_trace) trace.push_back(v);
  write_json_file(dir / "loss_trace.json", trace);
  write_effective_config(a.out, c);
  std::cout << "trained items=" << train_items.size() << " bits=" << rc.hash.k_bits
            << " epochs=" << rc.hash.epochs;
  if (!r.loss_trace.empty()) std::cout << " final_loss=" << r.loss_trace.back();
  std::cout << "\n";
  return kExitOk;
}

struct Evaluate {
  Common common;
  std::string features, split, model, out;
};

int run_evaluate(const Evaluate& a) {
  const RunConfig c = a.common.load();
  const FeatureTable all = load_features(a.features);
  const Split split = load_split(a.split);
  const FeatureTable train_items = select_items(all, split.train);
  const FeatureTable query = select_items(all, split.query);
  const HashModel model = load_model(a.model);
  const SparseWeightedGraph reference = reference_graph(train_items, c.graph, c.eval.tce_reference);
  MetricsReport m = evaluate_model(model, train_items, query, reference, c.graph.d_max, c.eval.k_cutoff);
  m.seed = c.seed;
  m.config_digest = config_digest(c);
  const std::string text = to_json(m).dump(2) + "\n";
  if (!a.out.empty()) {
    ensure_parent(a.out);
    write_file_atomic(a.out, text);
    write_effective_config(a.out, c);
  }
  std::cout << text;
  return kExitOk;
}

struct Sweep {
  Common common;
  std::string param;
  std::string values;
  int repeats = 5;
  std::string out;
};

std::string sweep_csv_header() { return "parameter,value,repeat,seed,map_i2t,map_t2i,map_avg,tce\n"; }

int run_sweep(const Sweep& a) {
  const RunConfig base = a.common.load();
  require(a.param == "epsilon" || a.param == "dmax", "--param must be epsilon or dmax");
  require(a.repeats >= 1, "--repeats must be positive");
  std::vector<std::string> values;
  {
    std::stringstream ss(a.values);
    std::string v;
    while (std::getline(ss, v, ',')) {
      if (!v.empty()) values.push_back(v);
    }
  }
  require(!values.empty(), "--values is empty");

  std::string csv = sweep_csv_header();
  for (const std::string& v : values) {
    for (int r = 0; r < a.repeats; ++r) {
      RunConfig c = base;
      // Repeat r uses the same seed at every grid point.
      c.seed = derive_seed(base.seed, "repeat", static_cast<std::uint64_t>(r));
      if (a.param == "epsilon") {
        if (v == "inf") {
          c.synthesis.audit_noiseless = true;
        } else {
          c.synthesis.epsilon = std::stod(v);
        }
      } else {
        c.graph.d_max = std::stoi(v);
      }
      const MetricsReport m = run_pipeline(c);
      char row[256];
      std::snprintf(row, sizeof(row), "%s,%s,%d,%llu,%.17g,%.17g,%.17g,%.17g\n", a.param.c_str(), v.c_str(),
                    r, static_cast<unsigned long long>(c.seed), m.map_i2t, m.map_t2i, m.map_avg, m.tce);
      csv += row;
      std::cerr << row;
    }
  }
  ensure_parent(a.out);
  write_file_atomic(a.out, csv);
  write_effective_config(a.out, base);
  return kExitOk;
}

struct Audit {
  Common common;
  std::string graph, out;
  int communities = 2;
};

int run_audit(const Audit& a) {
  const RunConfig c = a.common.load();
  ClippedGraph g;
  if (!a.graph.empty()) {
    g = load_graph(a.graph);
  } else {
    RunConfig small = c;
    small.data.n_communities = a.communities;
    const RunConfig rc = small.resolved();
    require(static_cast<std::size_t>(rc.data.n_items) <= kAuditNodeLimit,
            "audit graphs are limited to " + std::to_string(kAuditNodeLimit) + " nodes; pass --n");
    const MultimodalDataset ds = generate_synthetic(rc.data);
    g = build_clipped_graph(joint_features(ds.items), rc.graph.d_max, rc.graph.w_floor);
  }
  const SensitivityAudit r = empirical_sensitivity_audit(g, c.synthesis);
  const Json report = {{"observed_max", r.observed_max},
                       {"delta2", r.delta2},
                       {"pass", r.pass},
                       {"neighbors_checked", r.neighbors_checked},
                       {"worst_case", r.worst_case},
                       {"n_nodes", g.graph.n_nodes()},
                       {"n_edges", g.graph.n_edges()},
                       {"d_max", g.d_max}};
  if (!a.out.empty()) {
    ensure_parent(a.out);
    write_json_file(a.out, report);
    write_effective_config(a.out, c);
  }
  std::cout << report.dump(2) << "\n" << (r.pass ? "PASS" : "FAIL") << "\n";
  return r.pass ? kExitOk : kExitInvariant;
}

struct Pipeline {
  Common common;
  std::string out;
};

int run_pipeline_cmd(const Pipeline& a) {
  RunConfig c = a.common.load();
  if (!a.out.empty()) c.output_dir = a.out;
  PipelineArtifacts art;
  const MetricsReport m = run_pipeline(c, &art);
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  save_features(dir / "features.csv", art.dataset.items);
  save_split(dir / "split.json", art.dataset.split);
  save_graph(dir / "graph.tsv", art.clipped);
  save_node_ids(ids_sidecar(dir / "graph.tsv"), art.dataset.split.train);
  save_sanitized(dir / "sanitized.tsv", art.sanitized);
  save_model(dir / "model.json", art.trained.model);
  const FeatureTable& items = art.dataset.items;
  save_codes(dir / "codes_image.tsv", {items.ids, binarize(art.trained.model, items.image, Modality::kImage)});
  save_codes(dir / "codes_text.tsv", {items.ids, binarize(art.trained.model, items.text, Modality::kText)});
  const std::string text = to_json(m).dump(2) + "\n";
  write_file_atomic(dir / "metrics.json", text);
  write_effective_config(dir, c);
  print_receipt(art.sanitized.receipt);
  std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-private motif graph synthesis and cross-modal hashing"};
  app.require_subcommand(1);

  GenData gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic multimodal dataset and split");
  add_config_option(gen_cmd, gen.common);
  add_seed_option(gen_cmd, gen.common);
  add_data_options(gen_cmd, gen.common);
  gen_cmd->add_option("--out", gen.out, "output directory")->required();

  BuildGraph bg;
  auto* bg_cmd = app.add_subcommand("build-graph", "build the degree-clipped graph on training items");
  add_config_option(bg_cmd, bg.common);
  add_graph_options(bg_cmd, bg.common);
  bg_cmd->add_option("--features", bg.features, "feature CSV")->required()->check(CLI::ExistingFile);
  bg_cmd->add_option("--split", bg.split, "split JSON")->required()->check(CLI::ExistingFile);
  bg_cmd->add_option("--out", bg.out, "output graph TSV")->required();

  Synthesize syn;
  auto* syn_cmd = app.add_subcommand("synthesize", "release a sanitized graph under edge privacy");
  add_config_option(syn_cmd, syn.common);
  add_seed_option(syn_cmd, syn.common);
  add_synthesis_options(syn_cmd, syn.common);
  syn_cmd->add_option("--graph", syn.graph, "clipped graph TSV")->required()->check(CLI::ExistingFile);
  syn_cmd->add_option("--out", syn.out, "output sanitized TSV")->required();
  syn_cmd->add_flag("--audit-noiseless", syn.audit_noiseless, "run with sigma = 0 (NOT PRIVATE)");

  Distill dis;
  auto* dis_cmd = app.add_subcommand("distill", "train hash encoders against a sanitized graph");
  add_config_option(dis_cmd, dis.common);
  add_seed_option(dis_cmd, dis.common);
  add_hash_options(dis_cmd, dis.common);
  dis_cmd->add_option("--features", dis.features, "feature CSV")->required()->check(CLI::ExistingFile);
  dis_cmd->add_option("--sanitized", dis.sanitized, "sanitized graph TSV")->required()->check(CLI::ExistingFile);
  dis_cmd->add_option("--out", dis.out, "output directory")->required();

  Evaluate ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "compute mAP@K in both directions and TCE");
  add_config_option(ev_cmd, ev.common);
  add_seed_option(ev_cmd, ev.common);
  add_graph_options(ev_cmd, ev.common);
  add_eval_options(ev_cmd, ev.common);
  ev_cmd->add_option("--features", ev.features, "feature CSV")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--split", ev.split, "split JSON")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--model", ev.model, "model JSON")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--out", ev.out, "output metrics JSON");

  Sweep sw;
  auto* sw_cmd = app.add_subcommand("sweep", "run the pipeline over an epsilon or dmax grid");
  add_config_option(sw_cmd, sw.common);
  add_seed_option(sw_cmd, sw.common);
  add_data_options(sw_cmd, sw.common);
  add_graph_options(sw_cmd, sw.common);
  add_synthesis_options(sw_cmd, sw.common);
  add_hash_options(sw_cmd, sw.common);
  add_eval_options(sw_cmd, sw.common);
  sw_cmd->add_option("--param", sw.param, "epsilon or dmax")->required();
  sw_cmd->add_option("--values", sw.values, "comma-separated grid; 'inf' means sigma = 0 for epsilon")
      ->required();
  sw_cmd->add_option("--repeats", sw.repeats, "seeds per grid point")->capture_default_str();
  sw_cmd->add_option("--out", sw.out, "output CSV")->required();

  Audit au;
  auto* au_cmd = app.add_subcommand("audit-sensitivity", "exhaustive single-edge sensitivity audit");
  add_config_option(au_cmd, au.common);
  add_seed_option(au_cmd, au.common);
  add_data_options(au_cmd, au.common);
  add_graph_options(au_cmd, au.common);
  add_synthesis_options(au_cmd, au.common);
  au_cmd->add_option("--graph", au.graph, "graph TSV with at most 16 nodes")->check(CLI::ExistingFile);
  au_cmd->add_option("--planted-communities", au.communities, "communities of the generated graph")
      ->capture_default_str();
  au_cmd->add_option("--out", au.out, "output report JSON");

  Pipeline pl;
  auto* pl_cmd = app.add_subcommand("pipeline", "generate, clip, synthesize, distill and evaluate");
  add_config_option(pl_cmd, pl.common);
  add_seed_option(pl_cmd, pl.common);
  add_data_options(pl_cmd, pl.common);
  add_graph_options(pl_cmd, pl.common);
  add_synthesis_options(pl_cmd, pl.common);
  add_hash_options(pl_cmd, pl.common);
  add_eval_options(pl_cmd, pl.common);
  pl_cmd->add_option("--out", pl.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen_data(gen);
    if (*bg_cmd) return run_build_graph(bg);
    if (*syn_cmd) return run_synthesize(syn);
    if (*dis_cmd) return run_distill(dis);
    if (*ev_cmd) return run_evaluate(ev);
    if (*sw_cmd) return run_sweep(sw);
    if (*au_cmd) return run_audit(au);
    if (*pl_cmd) return run_pipeline_cmd(pl);
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
