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

// File formats: feature CSV, graph and sanitized-graph TSV with JSON sidecars,
// code listings, model JSON and split JSON. Writers go through a temporary
// file and a rename so a crash never leaves a truncated artifact behind.

#ifndef MOTIFDP_IO_HPP_
#define MOTIFDP_IO_HPP_

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "motifdp/config.hpp"
#include "motifdp/dataset.hpp"
#include "motifdp/error.hpp"
#include "motifdp/graph.hpp"
#include "motifdp/hashing.hpp"
#include "motifdp/synthesis.hpp"

namespace motifdp {

inline constexpr int kModelFormatVersion = 1;

// Shortest text for a double that parses back to the same bits.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

namespace internal {

// Splits text into lines, dropping a trailing carriage return from each.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(sep, start);
    out.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename T>
T parse_field(std::string_view s, const std::string& path, std::size_t line, const char* what) {
  T value{};
  if (!parse_number(s, value)) {
    throw ParseError(path, line, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return value;
}

inline std::string join_labels(const std::vector<int>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(labels[i]);
  }
  return out;
}

}  // namespace internal

// ---------------------------------------------------------------------------
// Features: `id,label,img_0..img_{dI-1},txt_0..txt_{dT-1}`; label is a
// `;`-separated list of integer labels (possibly empty).

inline std::string features_to_csv(const FeatureTable& table) {
  table.validate();
  std::string out = "id,label";
  for (Eigen::Index c = 0; c < table.image.cols(); ++c) out += ",img_" + std::to_string(c);
  for (Eigen::Index c = 0; c < table.text.cols(); ++c) out += ",txt_" + std::to_string(c);
  out += '\n';
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    out += std::to_string(table.ids[r]);
    out += ',';
    out += internal::join_labels(table.labels[r]);
    for (Eigen::Index c = 0; c < table.image.cols(); ++c) out += ',' + format_double(table.image(row, c));
    for (Eigen::Index c = 0; c < table.text.cols(); ++c) out += ',' + format_double(table.text(row, c));
    out += '\n';
  }
  return out;
}

inline FeatureTable features_from_csv(std::string_view text, const std::string& path = "<features>") {
  const auto lines = internal::split_lines(text);
  if (lines.empty()) throw ParseError(path, 1, "empty feature file");
  const auto header = internal::split(lines[0], ',');
  if (header.size() < 2 || header[0] != "id" || header[1] != "label") {
    throw ParseError(path, 1, "header must start with 'id,label'");
  }
  std::size_t d_image = 0;
  std::size_t d_text = 0;
  for (std::size_t c = 2; c < header.size(); ++c) {
    const bool image = header[c].starts_with("img_");
    const bool txt = header[c].starts_with("txt_");
    if (image && d_text == 0 && header[c] == "img_" + std::to_string(d_image)) {
      ++d_image;
    } else if (txt && header[c] == "txt_" + std::to_string(d_text)) {
      ++d_text;
    } else {
      throw ParseError(path, 1, "unexpected column '" + std::string(header[c]) + "'");
    }
  }
  if (d_image == 0 || d_text == 0) throw ParseError(path, 1, "need img_* and txt_* columns");

  std::vector<std::string_view> rows;
  std::vector<std::size_t> line_no;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    rows.push_back(lines[l]);
    line_no.push_back(l + 1);
  }
  FeatureTable t;
  t.ids.resize(rows.size());
  t.labels.resize(rows.size());
  t.image.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d_image));
  t.text.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d_text));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t ln = line_no[r];
    const auto fields = internal::split(rows[r], ',');
    if (fields.size() != header.size()) {
      throw ParseError(path, ln, "expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(fields.size()));
    }
    t.ids[r] = internal::parse_field<std::int64_t>(fields[0], path, ln, "id");
    if (!fields[1].empty()) {
      for (std::string_view lab : internal::split(fields[1], ';'))
        t.labels[r].push_back(internal::parse_field<int>(lab, path, ln, "label"));
      std::sort(t.labels[r].begin(), t.labels[r].end());
      t.labels[r].erase(std::unique(t.labels[r].begin(), t.labels[r].end()), t.labels[r].end());
    }
    const auto row = static_cast<Eigen::Index>(r);
    for (std::size_t c = 0; c < d_image; ++c) {
      const double v = internal::parse_field<double>(fields[2 + c], path, ln, "feature value");
      if (!std::isfinite(v)) throw ParseError(path, ln, "non-finite feature value");
      t.image(row, static_cast<Eigen::Index>(c)) = v;
    }
    for (std::size_t c = 0; c < d_text; ++c) {
      const double v = internal::parse_field<double>(fields[2 + d_image + c], path, ln, "feature value");
      if (!std::isfinite(v)) throw ParseError(path, ln, "non-finite feature value");
      t.text(row, static_cast<Eigen::Index>(c)) = v;
    }
  }
  try {
    t.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(path, 0, e.what());
  }
  return t;
}

inline void save_features(const std::filesystem::path& path, const FeatureTable& table) {
  write_file_atomic(path, features_to_csv(table));
}

inline FeatureTable load_features(const std::filesystem::path& path) {
  return features_from_csv(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Edge lists: header `#nodes=<n> dmax=<d>`, then `i<TAB>j<TAB>w` with i < j.

namespace internal {

struct EdgeListFile {
  std::size_t n_nodes = 0;
  int d_max = 0;
  std::vector<Edge> edges;
  // 1-based source line of each edge.
  std::vector<std::size_t> lines;
};

inline std::string edge_list_to_tsv(std::size_t n_nodes, int d_max, const std::vector<Edge>& edges) {
  std::string out = "#nodes=" + std::to_string(n_nodes) + " dmax=" + std::to_string(d_max) + "\n";
  for (const Edge& e : edges) {
    out += std::to_string(e.i) + '\t' + std::to_string(e.j) + '\t' + format_double(e.w) + '\n';
  }
  return out;
}

inline EdgeListFile edge_list_from_tsv(std::string_view text, const std::string& path) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(path, 1, "empty graph file");
  EdgeListFile f;
  {
    const std::string_view h = lines[0];
    const auto parts = split(h, ' ');
    if (parts.size() != 2 || !parts[0].starts_with("#nodes=") || !parts[1].starts_with("dmax=")) {
      throw ParseError(path, 1, "header must read '#nodes=<n> dmax=<d>'");
    }
    f.n_nodes = parse_field<std::size_t>(parts[0].substr(7), path, 1, "node count");
    f.d_max = parse_field<int>(parts[1].substr(5), path, 1, "dmax");
    if (f.d_max < 1) throw ParseError(path, 1, "dmax must be positive");
  }
  for (std::size_t l = 1; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    const std::size_t ln = l + 1;
    const auto fields = split(lines[l], '\t');
    if (fields.size() != 3) throw ParseError(path, ln, "expected 'i<TAB>j<TAB>w'");
    Edge e;
    e.i = parse_field<NodeId>(fields[0], path, ln, "node index");
    e.j = parse_field<NodeId>(fields[1], path, ln, "node index");
    e.w = parse_field<double>(fields[2], path, ln, "weight");
    if (e.i < 0 || e.j < 0 || static_cast<std::size_t>(e.j) >= f.n_nodes || e.i >= e.j) {
      throw ParseError(path, ln, "edge must satisfy 0 <= i < j < nodes");
    }
    if (!std::isfinite(e.w)) throw ParseError(path, ln, "non-finite weight");
    if (!f.edges.empty()) {
      const Edge& prev = f.edges.back();
      if (std::pair{prev.i, prev.j} >= std::pair{e.i, e.j}) {
        throw ParseError(path, ln, "edges must be sorted and unique");
      }
    }
    f.edges.push_back(e);
    f.lines.push_back(ln);
  }
  return f;
}

}  // namespace internal

inline std::string graph_to_tsv(const ClippedGraph& g) {
  return internal::edge_list_to_tsv(g.graph.n_nodes(), g.d_max, g.graph.edges());
}

// Rebuilds a clipped graph; a file that breaks its own degree bound is rejected.
inline ClippedGraph graph_from_tsv(std::string_view text, const std::string& path = "<graph>") {
  internal::EdgeListFile f = internal::edge_list_from_tsv(text, path);
  ClippedGraph g{SparseWeightedGraph(f.n_nodes, 1.0), f.d_max};
  for (std::size_t p = 0; p < f.edges.size(); ++p) {
    const Edge& e = f.edges[p];
    try {
      g.graph.add_edge(e.i, e.j, e.w);
    } catch (const InvalidArgument& err) {
      throw ParseError(path, f.lines[p], err.what());
    }
    if (g.graph.degree(e.i) > static_cast<std::size_t>(g.d_max) ||
        g.graph.degree(e.j) > static_cast<std::size_t>(g.d_max)) {
      throw ParseError(path, f.lines[p], "edge exceeds the declared dmax");
    }
  }
  return g;
}

inline void save_graph(const std::filesystem::path& path, const ClippedGraph& g) {
  write_file_atomic(path, graph_to_tsv(g));
}

inline ClippedGraph load_graph(const std::filesystem::path& path) {
  return graph_from_tsv(read_file(path), path.string());
}

// `<graph>.ids`: the dataset item id of each node, one per line.
inline std::filesystem::path ids_sidecar(const std::filesystem::path& graph_path) {
  return graph_path.string() + ".ids";
}

inline void save_node_ids(const std::filesystem::path& path, const std::vector<std::int64_t>& ids) {
  std::string out;
  for (std::int64_t id : ids) out += std::to_string(id) + '\n';
  write_file_atomic(path, out);
}

inline std::vector<std::int64_t> load_node_ids(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::int64_t> ids;
  const auto lines = internal::split_lines(text);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    ids.push_back(internal::parse_field<std::int64_t>(lines[l], path.string(), l + 1, "id"));
  }
  return ids;
}

// ---------------------------------------------------------------------------
// Sanitized graphs: the edge-list format (weights in [0, 1]) plus
// `<path>.receipt.json` holding the privacy receipt and node ids.

inline std::filesystem::path receipt_sidecar(const std::filesystem::path& sanitized_path) {
  return sanitized_path.string() + ".receipt.json";
}

inline Json sanitized_receipt_json(const SanitizedGraph& g) {
  Json j = to_json(g.receipt);
  j["n_nodes"] = g.n_nodes;
  j["node_ids"] = g.node_ids;
  return j;
}

inline std::string sanitized_to_tsv(const SanitizedGraph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.entries.size());
  for (const SanitizedEntry& e : g.entries) edges.push_back(Edge{e.i, e.j, e.w});
  return internal::edge_list_to_tsv(g.n_nodes, g.receipt.d_max, edges);
}

inline SanitizedGraph sanitized_from_text(std::string_view tsv, const Json& receipt,
                                          const std::string& path = "<sanitized>") {
  internal::EdgeListFile f = internal::edge_list_from_tsv(tsv, path);
  SanitizedGraph g;
  g.n_nodes = f.n_nodes;
  for (std::size_t p = 0; p < f.edges.size(); ++p) {
    const Edge& e = f.edges[p];
    if (e.w < 0.0 || e.w > 1.0) throw ParseError(path, f.lines[p], "sanitized weight outside [0, 1]");
    g.entries.push_back(SanitizedEntry{e.i, e.j, e.w});
  }
  try {
    g.receipt = receipt_from_json(receipt);
    if (receipt.contains("n_nodes") && receipt.at("n_nodes").get<std::size_t>() != g.n_nodes) {
      throw InvalidArgument("receipt node count differs from the edge list");
    }
    if (receipt.contains("node_ids")) g.node_ids = receipt.at("node_ids").get<std::vector<std::int64_t>>();
  } catch (const Json::exception& e) {
    throw ParseError(path + ".receipt.json", 0, e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(path + ".receipt.json", 0, e.what());
  }
  if (g.receipt.d_max != f.d_max) throw ParseError(path, 1, "dmax differs from the receipt");
  if (!g.node_ids.empty() && g.node_ids.size() != g.n_nodes) {
    throw ParseError(path + ".receipt.json", 0, "node_ids length differs from the node count");
  }
  return g;
}

inline void save_sanitized(const std::filesystem::path& path, const SanitizedGraph& g) {
  write_file_atomic(path, sanitized_to_tsv(g));
  write_json_file(receipt_sidecar(path), sanitized_receipt_json(g));
}

inline SanitizedGraph load_sanitized(const std::filesystem::path& path) {
  return sanitized_from_text(read_file(path), read_json_file(receipt_sidecar(path)), path.string());
}

// ---------------------------------------------------------------------------
// Codes: `id<TAB>` followed by K characters of '+' / '-'.

struct CodeFile {
  std::vector<std::int64_t> ids;
  CodeMatrix codes;

  friend bool operator==(const CodeFile&, const CodeFile&) = default;
};

inline std::string codes_to_text(const CodeFile& f) {
  require(f.ids.size() == f.codes.rows, "one id per code row required");
  std::string out;
  for (std::size_t r = 0; r < f.codes.rows; ++r) {
    out += std::to_string(f.ids[r]);
    out += '\t';
    for (std::int8_t b : f.codes.row(r)) out += b > 0 ? '+' : '-';
    out += '\n';
  }
  return out;
}

inline CodeFile codes_from_text(std::string_view text, const std::string& path = "<codes>") {
  CodeFile f;
  const auto lines = internal::split_lines(text);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    const std::size_t ln = l + 1;
    const auto fields = internal::split(lines[l], '\t');
    if (fields.size() != 2) throw ParseError(path, ln, "expected 'id<TAB>code'");
    f.ids.push_back(internal::parse_field<std::int64_t>(fields[0], path, ln, "id"));
    const std::string_view bits = fields[1];
    if (bits.empty()) throw ParseError(path, ln, "empty code");
    if (f.codes.rows == 0) f.codes.k = bits.size();
    if (bits.size() != f.codes.k) throw ParseError(path, ln, "code length differs from the first row");
    for (char c : bits) {
      if (c != '+' && c != '-') throw ParseError(path, ln, "code characters must be '+' or '-'");
      f.codes.bits.push_back(c == '+' ? 1 : -1);
    }
    ++f.codes.rows;
  }
  return f;
}

inline void save_codes(const std::filesystem::path& path, const CodeFile& f) {
  write_file_atomic(path, codes_to_text(f));
}

inline CodeFile load_codes(const std::filesystem::path& path) {
  return codes_from_text(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Model: versioned JSON with the config and every tensor in row-major order.

namespace internal {

inline Json tensor_to_json(const Matrix& m) {
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

inline Json tensor_to_json(const Vector& v) {
  return {{"rows", v.size()}, {"cols", 1}, {"data", std::vector<double>(v.data(), v.data() + v.size())}};
}

inline Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  require(rows >= 0 && cols >= 0 && static_cast<std::size_t>(rows * cols) == data.size(),
          "tensor shape does not match its data");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

inline Vector vector_from_json(const Json& j) {
  const Matrix m = matrix_from_json(j);
  require(m.cols() == 1, "expected a column vector");
  return m.col(0);
}

inline Json encoder_to_json(const DenseEncoder& e) {
  return {{"w1", tensor_to_json(e.w1)},
          {"b1", tensor_to_json(e.b1)},
          {"w2", tensor_to_json(e.w2)},
          {"b2", tensor_to_json(e.b2)}};
}

inline DenseEncoder encoder_from_json(const Json& j) {
  DenseEncoder e;
  e.w1 = matrix_from_json(j.at("w1"));
  e.b1 = vector_from_json(j.at("b1"));
  e.w2 = matrix_from_json(j.at("w2"));
  e.b2 = vector_from_json(j.at("b2"));
  require(e.b1.size() == e.w1.rows() && e.w2.cols() == e.w1.rows() && e.b2.size() == e.w2.rows(),
          "encoder tensor shapes are inconsistent");
  return e;
}

}  // namespace internal

inline Json model_to_json(const HashModel& m) {
  return {{"format", "motifdp-hash-model"},
          {"version", kModelFormatVersion},
          {"seed", m.config.seed},
          {"config", to_json(m.config)},
          {"image", internal::encoder_to_json(m.image)},
          {"text", internal::encoder_to_json(m.text)}};
}

inline HashModel model_from_json(const Json& j, const std::string& path = "<model>") {
  try {
    if (j.at("format").get<std::string>() != "motifdp-hash-model") {
      throw ParseError(path, 0, "not a hash model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError(path, 0, "unsupported model version " + std::to_string(version));
    }
    HashModel m;
    from_json(j.at("config"), m.config);
    m.config.validate();
    m.image = internal::encoder_from_json(j.at("image"));
    m.text = internal::encoder_from_json(j.at("text"));
    const auto k = static_cast<Eigen::Index>(m.config.k_bits);
    require(m.image.w1.cols() == m.config.image_dim && m.text.w1.cols() == m.config.text_dim &&
                m.image.w2.rows() == k && m.text.w2.rows() == k,
            "model tensors disagree with its config");
    return m;
  } catch (const Json::exception& e) {
    throw ParseError(path, 0, e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(path, 0, e.what());
  }
}

inline void save_model(const std::filesystem::path& path, const HashModel& m) {
  write_json_file(path, model_to_json(m));
}

inline HashModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_json_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Split: `{"train": [ids], "query": [ids]}`.

inline Json split_to_json(const Split& s) { return {{"train", s.train}, {"query", s.query}}; }

inline Split split_from_json(const Json& j, const std::string& path = "<split>") {
  try {
    Split s{j.at("train").get<std::vector<std::int64_t>>(),
            j.at("query").get<std::vector<std::int64_t>>()};
    check_no_query_leakage(s.train, s.query);
    return s;
  } catch (const Json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
}

inline void save_split(const std::filesystem::path& path, const Split& s) {
  write_json_file(path, split_to_json(s));
}

inline Split load_split(const std::filesystem::path& path) {
  return split_from_json(read_json_file(path), path.string());
}

}  // namespace motifdp

#endif  // MOTIFDP_IO_HPP_
