#include "cgcn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <sstream>
#include <string>
#include <string_view>

#include "cgcn/error.hpp"
#include "cgcn/sparse.hpp"

namespace cgcn {
namespace {

[[noreturn]] void fail_at(const std::filesystem::path& file, std::size_t line, const std::string& msg) {
  throw InputError(file.filename().string() + ":" + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot open " + p.string());
  return f;
}

DenseMatrix read_features(const std::filesystem::path& p) {
  std::ifstream f = open_input(p);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(f, line)) fail_at(p, 1, "missing 'N,F' header");
  const auto header = split(trim(line), ',');
  std::size_t n = 0, cols = 0;
  if (header.size() != 2 || !parse_number(header[0], n) || !parse_number(header[1], cols)) {
    fail_at(p, 1, "expected header 'N,F'");
  }
  DenseMatrix x(n, cols);
  std::size_t row = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (row >= n) fail_at(p, line_no, "more feature rows than the header's N=" + std::to_string(n));
    const auto fields = split(t, ',');
    if (fields.size() != cols) {
      fail_at(p, line_no, "expected " + std::to_string(cols) + " values, got " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!parse_number(fields[j], v) || !std::isfinite(v)) {
        fail_at(p, line_no, "bad feature value '" + std::string(fields[j]) + "'");
      }
      x(row, j) = v;
    }
    ++row;
  }
  if (row != n) {
    throw InputError(p.filename().string() + ": header declares " + std::to_string(n) +
                     " rows but file has " + std::to_string(row));
  }
  return x;
}

SparseMatrix read_graph(const std::filesystem::path& p, std::size_t n) {
  std::ifstream f = open_input(p);
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, '\t');
    Index u = -1, v = -1;
    if (fields.size() != 2 || !parse_number(fields[0], u) || !parse_number(fields[1], v)) {
      fail_at(p, line_no, "expected 'src\\tdst'");
    }
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
      fail_at(p, line_no, "node id outside [0," + std::to_string(n) + ")");
    }
    edges.emplace_back(u, v);
  }
  return from_edges(edges, n);
}

LabelTable read_labels(const std::filesystem::path& p, std::size_t n, std::optional<Task> task) {
  std::ifstream f = open_input(p);
  std::vector<std::optional<std::vector<std::int32_t>>> rows(n);
  bool saw_multi = false;
  std::string line;
  std::size_t line_no = 0;
  std::int32_t max_id = -1;
  while (std::getline(f, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto tab = t.find('\t');
    if (tab == std::string_view::npos) fail_at(p, line_no, "expected 'node\\tlabel'");
    Index node = -1;
    if (!parse_number(t.substr(0, tab), node) || node < 0 || static_cast<std::size_t>(node) >= n) {
      fail_at(p, line_no, "bad node id");
    }
    if (rows[node]) fail_at(p, line_no, "node " + std::to_string(node) + " labelled twice");
    std::vector<std::int32_t> ids;
    const auto rest = t.substr(tab + 1);
    if (rest.find(',') != std::string_view::npos) saw_multi = true;
    if (!trim(rest).empty()) {
      for (auto tok : split(rest, ',')) {
        std::int32_t id = -1;
        if (!parse_number(tok, id) || id < 0) fail_at(p, line_no, "bad label '" + std::string(tok) + "'");
        ids.push_back(id);
        max_id = std::max(max_id, id);
      }
    } else {
      saw_multi = true;
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) fail_at(p, line_no, "repeated label id");
    rows[node] = std::move(ids);
  }
  LabelTable labels;
  labels.task = task.value_or(saw_multi ? Task::kMultilabel : Task::kMulticlass);
  labels.n_classes = static_cast<std::size_t>(max_id + 1);
  labels.ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i]) throw InputError(p.filename().string() + ": node " + std::to_string(i) + " has no label row");
    if (labels.task == Task::kMulticlass && rows[i]->size() != 1) {
      throw InputError(p.filename().string() + ": node " + std::to_string(i) +
                       " needs exactly one label for a multiclass task");
    }
    labels.ids.push_back(std::move(*rows[i]));
  }
  return labels;
}

Splits read_splits(const std::filesystem::path& p) {
  std::ifstream f = open_input(p);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(p.filename().string() + ": " + e.what());
  }
  if (!j.is_object()) throw InputError(p.filename().string() + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "train" && key != "val" && key != "test") {
      throw InputError(p.filename().string() + ": unknown key '" + key + "'");
    }
  }
  Splits s;
  auto read = [&](const char* key, std::vector<Index>& out) {
    if (!j.contains(key)) throw InputError(p.filename().string() + ": missing '" + key + "'");
    try {
      out = j.at(key).get<std::vector<Index>>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(p.filename().string() + ": '" + key + "' must be an integer list");
    }
  };
  read("train", s.train);
  read("val", s.val);
  read("test", s.test);
  return s;
}

}  // namespace

void Dataset::validate() const {
  graph.validate();
  const std::size_t n = graph.n_rows;
  if (graph.n_cols != n) throw InputError("dataset: graph must be square");
  if (features.rows() != n) {
    throw InputError("dataset: features have " + std::to_string(features.rows()) + " rows, graph has " +
                     std::to_string(n) + " nodes");
  }
  if (labels.size() != n) throw InputError("dataset: label rows do not match node count");
  std::vector<int> owner(n, 0);
  auto mark = [&](const std::vector<Index>& ids, int tag, const char* name) {
    for (Index v : ids) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) {
        throw InputError(std::string("dataset: ") + name + " split has invalid node id " + std::to_string(v));
      }
      if (owner[v] != 0) {
        throw InputError(std::string("dataset: node ") + std::to_string(v) + " appears in more than one split entry (" +
                         name + ")");
      }
      owner[v] = tag;
    }
  };
  mark(splits.train, 1, "train");
  mark(splits.val, 2, "val");
  mark(splits.test, 3, "test");
}

Dataset load_dataset(const std::filesystem::path& dir, std::optional<Task> task) {
  Dataset ds;
  ds.features = read_features(dir / "features.csv");
  const std::size_t n = ds.features.rows();
  ds.graph = read_graph(dir / "graph.tsv", n);
  ds.labels = read_labels(dir / "labels.tsv", n, task);
  ds.splits = read_splits(dir / "splits.json");
  ds.validate();
  return ds;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw InputError("cannot write " + tmp.string());
    f << content;
    if (!f) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  ds.validate();
  std::filesystem::create_directories(dir);
  std::ostringstream g;
  for (std::size_t r = 0; r < ds.graph.n_rows; ++r) {
    for (Index c : ds.graph.row_cols(r)) {
      if (static_cast<std::size_t>(c) > r) g << r << '\t' << c << '\n';
    }
  }
  write_file_atomic(dir / "graph.tsv", g.str());

  std::string x = std::to_string(ds.features.rows()) + "," + std::to_string(ds.features.cols()) + "\n";
  for (std::size_t i = 0; i < ds.features.rows(); ++i) {
    for (std::size_t j = 0; j < ds.features.cols(); ++j) {
      if (j) x += ',';
      x += format_double(ds.features(i, j));
    }
    x += '\n';
  }
  write_file_atomic(dir / "features.csv", x);

  std::ostringstream l;
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    l << i << '\t';
    const auto& ids = ds.labels.ids[i];
    for (std::size_t k = 0; k < ids.size(); ++k) l << (k ? "," : "") << ids[k];
    l << '\n';
  }
  write_file_atomic(dir / "labels.tsv", l.str());

  nlohmann::ordered_json s;
  s["train"] = ds.splits.train;
  s["val"] = ds.splits.val;
  s["test"] = ds.splits.test;
  write_file_atomic(dir / "splits.json", s.dump() + "\n");
}

DenseMatrix normalize_features(const DenseMatrix& x, std::span<const Index> train_nodes) {
  if (train_nodes.empty()) throw InputError("normalize_features: no training rows");
  const std::size_t f = x.cols();
  std::vector<double> mean(f, 0.0), var(f, 0.0);
  for (Index r : train_nodes) {
    for (std::size_t j = 0; j < f; ++j) mean[j] += x(r, j);
  }
  const double inv_n = 1.0 / static_cast<double>(train_nodes.size());
  for (double& m : mean) m *= inv_n;
  for (Index r : train_nodes) {
    for (std::size_t j = 0; j < f; ++j) {
      const double d = x(r, j) - mean[j];
      var[j] += d * d;
    }
  }
  DenseMatrix out(x.rows(), f);
  for (std::size_t j = 0; j < f; ++j) {
    const double sd = std::sqrt(var[j] * inv_n);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean[j])))) continue;
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = (x(i, j) - mean[j]) / sd;
  }
  return out;
}

}  // namespace cgcn
