#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"

#include "cgcn/config.hpp"
#include "cgcn/dataset.hpp"
#include "cgcn/error.hpp"
#include "cgcn/synth.hpp"

using namespace cgcn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  void put(const std::string& file, const std::string& content) const { std::ofstream(path / file) << content; }
};

void toy(const TempDir& d) {
  d.put("graph.tsv", "0\t1\n1\t2\n2\t0\n1\t0\n");
  d.put("features.csv", "3,2\n1.0,2.0\n0.5,-1\n3,4e-1\n");
  d.put("labels.tsv", "0\t0\n1\t1\n2\t0\n");
  d.put("splits.json", R"({"train":[0,1],"val":[2],"test":[]})");
}

std::string load_error(const TempDir& d) {
  try {
    load_dataset(d.path);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("toy dataset loads") {
  TempDir d("cgcn_ds_toy");
  toy(d);
  const auto ds = load_dataset(d.path);
  CHECK(ds.n_nodes() == 3);
  CHECK(ds.graph.nnz() == 6);
  CHECK(ds.features.cols() == 2);
  CHECK(ds.features(2, 1) == 0.4);
  CHECK(ds.task() == Task::kMulticlass);
  CHECK(ds.labels.n_classes == 2);
  CHECK(ds.splits.train == std::vector<Index>{0, 1});
  CHECK(ds.splits.test.empty());
}

TEST_CASE("multilabel tokens become id sets") {
  TempDir d("cgcn_ds_ml");
  toy(d);
  d.put("labels.tsv", "0\t1,3,7\n1\t\n2\t0\n");
  const auto ds = load_dataset(d.path);
  CHECK(ds.task() == Task::kMultilabel);
  CHECK(ds.labels.ids[0] == std::vector<std::int32_t>{1, 3, 7});
  CHECK(ds.labels.ids[1].empty());
  CHECK(ds.labels.n_classes == 8);
  CHECK_THROWS_AS(load_dataset(d.path, Task::kMulticlass), InputError);
}

TEST_CASE("loader rejects bad input with a location") {
  TempDir d("cgcn_ds_bad");
  SUBCASE("overlapping splits") {
    toy(d);
    d.put("splits.json", R"({"train":[0,1],"val":[],"test":[1]})");
    CHECK(load_error(d).find("more than one split") != std::string::npos);
  }
  SUBCASE("malformed graph line") {
    toy(d);
    d.put("graph.tsv", "0\t1\n1 x\n");
    const auto msg = load_error(d);
    CHECK(msg.find("graph.tsv") != std::string::npos);
    CHECK(msg.find(":2") != std::string::npos);
  }
  SUBCASE("edge id out of range") {
    toy(d);
    d.put("graph.tsv", "0\t5\n");
    CHECK_FALSE(load_error(d).empty());
  }
  SUBCASE("feature row count mismatch") {
    toy(d);
    d.put("features.csv", "3,2\n1,2\n3,4\n");
    CHECK(load_error(d).find("features.csv") != std::string::npos);
  }
  SUBCASE("feature width mismatch") {
    toy(d);
    d.put("features.csv", "3,2\n1,2\n3,4,5\n6,7\n");
    CHECK(load_error(d).find(":3") != std::string::npos);
  }
  SUBCASE("non-finite feature") {
    toy(d);
    d.put("features.csv", "3,2\n1,2\nnan,4\n6,7\n");
    CHECK_FALSE(load_error(d).empty());
  }
  SUBCASE("missing label row") {
    toy(d);
    d.put("labels.tsv", "0\t0\n2\t0\n");
    CHECK_FALSE(load_error(d).empty());
  }
  SUBCASE("unknown split key") {
    toy(d);
    d.put("splits.json", R"({"train":[0],"val":[],"test":[],"extra":[]})");
    CHECK(load_error(d).find("extra") != std::string::npos);
  }
  SUBCASE("missing file") {
    toy(d);
    fs::remove(d.path / "labels.tsv");
    CHECK(load_error(d).find("labels.tsv") != std::string::npos);
  }
}

TEST_CASE("write then load reproduces the dataset") {
  TempDir d("cgcn_ds_rt");
  auto ds = synth::sbm_dataset({{20, 30}, 0.2, 0.02, 5, 1.0, 1.0, 0.5, 0.2, 3});
  ds.features(0, 0) = 1.0 / 3.0;
  ds.features(1, 1) = -1e-300;
  write_dataset(ds, d.path);
  CHECK(load_dataset(d.path) == ds);

  LabelTable ml{Task::kMultilabel, 4, {}};
  for (std::size_t i = 0; i < 50; ++i)
    ml.ids.push_back(i % 5 == 0 ? std::vector<std::int32_t>{} : std::vector<std::int32_t>{0, static_cast<std::int32_t>(i % 4)});
  for (auto& r : ml.ids) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  ds.labels = ml;
  write_dataset(ds, d.path);
  CHECK(load_dataset(d.path) == ds);
}

TEST_CASE("normalize_features") {
  SUBCASE("constant column becomes zero") {
    DenseMatrix x(3, 1);
    for (double& v : x.values()) v = 4.2;
    const std::vector<Index> train{0, 1, 2};
    CHECK(normalize_features(x, train) == DenseMatrix(3, 1));
  }
  SUBCASE("{-1, 1} is already standardized") {
    DenseMatrix x(2, 1);
    x(0, 0) = -1;
    x(1, 0) = 1;
    const std::vector<Index> train{0, 1};
    CHECK(normalize_features(x, train) == x);
  }
  SUBCASE("{0, 2, 4} with population std") {
    DenseMatrix x(4, 1);
    x(0, 0) = 0;
    x(1, 0) = 2;
    x(2, 0) = 4;
    x(3, 0) = 100;  // not a training row
    const std::vector<Index> train{0, 1, 2};
    const auto z = normalize_features(x, train);
    const double s = std::sqrt(8.0 / 3.0);
    CHECK(z(0, 0) == doctest::Approx(-2.0 / s).epsilon(1e-15));
    CHECK(z(0, 0) == doctest::Approx(-1.2247448713915890).epsilon(1e-12));
    CHECK(z(1, 0) == 0.0);
    CHECK(z(2, 0) == doctest::Approx(1.2247448713915890).epsilon(1e-12));
    CHECK(z(3, 0) == doctest::Approx(98.0 / s).epsilon(1e-15));
  }
  SUBCASE("empty training set rejected") {
    CHECK_THROWS_AS(normalize_features(DenseMatrix(2, 2), {}), InputError);
  }
}

TEST_CASE("config parsing") {
  SUBCASE("defaults and overrides") {
    const auto rc = parse_run_config(nlohmann::json::parse(
        R"({"layers":3,"hidden":[32,16],"variant":"diag_enhanced","lambda":0.5,"partitions":20,
            "clusters_per_batch":4,"epochs":5,"lr":0.005,"dropout_rate":0.1,"seed":7,"norm_mode":"sym",
            "task":"multilabel","mode":"full_batch","partition_method":"random","precompute_ax":true,
            "inductive":true,"feature_norm":false,"data":"d","out":"o","partition":"p"})"));
    const auto& c = rc.train;
    CHECK(c.layers == 3);
    CHECK(c.hidden == std::vector<std::size_t>{32, 16});
    CHECK(c.variant == Variant::kDiagEnhanced);
    CHECK(c.norm_mode == NormMode::kSym);
    CHECK(c.mode == TrainMode::kFullBatch);
    CHECK(c.dropout_rate == 0.1);
    CHECK(rc.data->string() == "d");
    const auto d = parse_run_config(nlohmann::json::object());
    CHECK(d.train.lr == 0.01);
    CHECK(d.train.hidden == std::vector<std::size_t>{64});
  }
  SUBCASE("to_json round trips") {
    TrainConfig c;
    c.hidden = {8};
    c.lambda = 0.3;
    c.task = Task::kMultilabel;
    const auto back = parse_run_config(nlohmann::json::parse(to_json(c).dump())).train;
    CHECK(to_json(back) == to_json(c));
  }
  SUBCASE("every unknown key or bad value is a usage error naming the key") {
    const std::pair<const char*, const char*> cases[] = {
        {R"({"learning_rate":0.1})", "learning_rate"},
        {R"({"epochs":0})", "epochs"},
        {R"({"epochs":-3})", "epochs"},
        {R"({"epochs":"ten"})", "epochs"},
        {R"({"dropout_rate":1.0})", "dropout_rate"},
        {R"({"dropout_rate":-0.1})", "dropout_rate"},
        {R"({"lr":0})", "lr"},
        {R"({"lambda":-1})", "lambda"},
        {R"({"layers":0})", "layers"},
        {R"({"layers":3,"hidden":[4]})", "hidden"},
        {R"({"hidden":[0]})", "hidden"},
        {R"({"partitions":2,"clusters_per_batch":3})", "clusters_per_batch"},
        {R"({"variant":"gat"})", "variant"},
        {R"({"norm_mode":"col"})", "norm_mode"},
        {R"({"task":"regression"})", "task"},
        {R"({"mode":"sgd"})", "mode"},
        {R"({"partition_method":"spectral"})", "partition_method"},
        {R"({"precompute_ax":1})", "precompute_ax"},
        {R"({"seed":-1})", "seed"},
        {R"({"seed":1.5})", "seed"},
    };
    for (const auto& [text, key] : cases) {
      CAPTURE(text);
      try {
        parse_run_config(nlohmann::json::parse(text));
        FAIL("accepted");
      } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find(key) != std::string::npos);
      }
    }
    CHECK_THROWS_AS(parse_run_config(nlohmann::json::parse("[1]")), UsageError);
  }
}
