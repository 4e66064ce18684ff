#include "cgcn/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <string>

#include "cgcn/dataset.hpp"
#include "cgcn/error.hpp"

namespace cgcn {
namespace {

nlohmann::ordered_json matrix_json(const DenseMatrix& m) {
  nlohmann::ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  auto& vals = j["values"] = nlohmann::ordered_json::array();
  for (double v : m.values()) vals.push_back(format_double(v));
  return j;
}

double parse_decimal(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("checkpoint: bad decimal string '" + s + "'");
  }
  return v;
}

DenseMatrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  std::vector<double> vals;
  vals.reserve(rows * cols);
  for (const auto& v : j.at("values")) vals.push_back(parse_decimal(v.get<std::string>()));
  return DenseMatrix(rows, cols, std::move(vals));
}

}  // namespace

nlohmann::ordered_json to_json(const Checkpoint& c) {
  nlohmann::ordered_json j;
  j["format"] = "cluster-gcn-checkpoint";
  j["version"] = Checkpoint::kVersion;
  j["dims"] = c.model.dims;
  j["variant"] = std::string(to_string(c.model.variant));
  j["lambda"] = format_double(c.model.lambda);
  j["task"] = std::string(to_string(c.model.task));
  j["norm_mode"] = std::string(to_string(c.norm_mode));
  j["feature_norm"] = c.feature_norm;
  auto& w = j["weights"] = nlohmann::ordered_json::array();
  for (const auto& m : c.model.weights) w.push_back(matrix_json(m));
  if (c.adam) {
    nlohmann::ordered_json a;
    a["step"] = c.adam->step;
    a["lr"] = format_double(c.adam->lr);
    a["beta1"] = format_double(c.adam->beta1);
    a["beta2"] = format_double(c.adam->beta2);
    a["eps"] = format_double(c.adam->eps);
    a["m"] = nlohmann::ordered_json::array();
    a["v"] = nlohmann::ordered_json::array();
    for (const auto& m : c.adam->m) a["m"].push_back(matrix_json(m));
    for (const auto& v : c.adam->v) a["v"].push_back(matrix_json(v));
    j["adam"] = std::move(a);
  }
  return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "cluster-gcn-checkpoint") {
      throw InputError("checkpoint: unrecognised format tag");
    }
    if (j.at("version").get<int>() != Checkpoint::kVersion) {
      throw InputError("checkpoint: unsupported version " + j.at("version").dump());
    }
    Checkpoint c;
    c.model.dims = j.at("dims").get<std::vector<std::size_t>>();
    c.model.variant = parse_variant(j.at("variant").get<std::string>());
    c.model.lambda = parse_decimal(j.at("lambda").get<std::string>());
    c.model.task = parse_task(j.at("task").get<std::string>());
    c.norm_mode = parse_norm_mode(j.at("norm_mode").get<std::string>());
    c.feature_norm = j.at("feature_norm").get<bool>();
    for (const auto& w : j.at("weights")) c.model.weights.push_back(matrix_from_json(w));
    c.model.validate();
    if (j.contains("adam")) {
      const auto& a = j.at("adam");
      AdamState s;
      s.step = a.at("step").get<std::uint64_t>();
      s.lr = parse_decimal(a.at("lr").get<std::string>());
      s.beta1 = parse_decimal(a.at("beta1").get<std::string>());
      s.beta2 = parse_decimal(a.at("beta2").get<std::string>());
      s.eps = parse_decimal(a.at("eps").get<std::string>());
      for (const auto& m : a.at("m")) s.m.push_back(matrix_from_json(m));
      for (const auto& v : a.at("v")) s.v.push_back(matrix_from_json(v));
      if (s.m.size() != c.model.weights.size() || s.v.size() != c.model.weights.size()) {
        throw InputError("checkpoint: optimizer state does not match the weights");
      }
      c.adam = std::move(s);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint: ") + e.what());
  }
}

void write_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(c).dump() + "\n");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace cgcn
