#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "cgcn/cli.hpp"
#include "cgcn/dataset.hpp"
#include "cgcn/partition.hpp"
#include "cgcn/synth.hpp"
#include "json.hpp"

using namespace cgcn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

struct Workspace {
  fs::path root = fs::temp_directory_path() / "cgcn_cli_test";
  fs::path data = root / "data";
  Workspace() {
    fs::remove_all(root);
    fs::create_directories(data);
    write_dataset(synth::sbm_dataset({{60, 60, 60}, 0.12, 0.01, 6, 1.0, 1.0, 0.5, 0.2, 4}), data);
  }
  ~Workspace() { fs::remove_all(root); }
  std::string config(const std::string& name, const std::string& body) const {
    std::ofstream(root / name) << body;
    return (root / name).string();
  }
};

void check_json_finite(const nlohmann::json& j) {
  if (j.is_number_float()) CHECK(std::isfinite(j.get<double>()));
  if (j.is_structured())
    for (const auto& v : j) check_json_finite(v);
}

}  // namespace

TEST_CASE("partition --clusters 1") {
  Workspace w;
  const auto out = (w.root / "p1.tsv").string();
  const auto r = cli({"partition", "--data", w.data.string(), "--clusters", "1", "--out", out});
  REQUIRE(r.code == 0);
  const auto p = read_partition(out);
  for (Index c : p.assignment) CHECK(c == 0);
  const auto q = nlohmann::json::parse(slurp(out + ".quality.json"));
  CHECK(q["within_fraction"].get<double>() == 1.0);
  CHECK(q["edge_cut"].get<int>() == 0);
  check_json_finite(q);
}

TEST_CASE("train twice gives byte-identical CSV; eval and external partitions work") {
  Workspace w;
  const auto cfg = w.config("c.json", R"({"epochs":5,"hidden":8,"partitions":6,"clusters_per_batch":2,"seed":3})");
  const auto a = (w.root / "a").string(), b = (w.root / "b").string();
  REQUIRE(cli({"train", "--data", w.data.string(), "--config", cfg, "--out", a}).code == 0);
  REQUIRE(cli({"train", "--data", w.data.string(), "--config", cfg, "--out", b}).code == 0);
  CHECK(slurp(fs::path(a) / "report.csv") == slurp(fs::path(b) / "report.csv"));
  CHECK(slurp(fs::path(a) / "checkpoint.json") == slurp(fs::path(b) / "checkpoint.json"));
  const auto report = nlohmann::json::parse(slurp(fs::path(a) / "report.json"));
  CHECK(report["epochs"].size() == 5);
  check_json_finite(report);

  const auto e = cli({"eval", "--data", w.data.string(), "--checkpoint", (fs::path(a) / "checkpoint.json").string()});
  REQUIRE(e.code == 0);
  CHECK(e.out.find("test_micro_f1 ") != std::string::npos);
  const double f1 = std::stod(e.out.substr(e.out.find(' ') + 1));
  CHECK(f1 == doctest::Approx(report["test_f1"].get<double>()).epsilon(1e-12));

  // Feeding the partition back reproduces the run.
  const auto c = (w.root / "c").string();
  REQUIRE(cli({"train", "--data", w.data.string(), "--config", cfg, "--partition",
               (fs::path(a) / "partition.tsv").string(), "--out", c})
              .code == 0);
  CHECK(slurp(fs::path(a) / "report.csv") == slurp(fs::path(c) / "report.csv"));
}

TEST_CASE("bench-cost prints one row per layer count") {
  Workspace w;
  const auto r = cli({"bench-cost", "--data", w.data.string(), "--layers", "3", "--sample-cap", "2"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].rfind("layers\t", 0) == 0);
  CHECK(lines[3].rfind("3\t", 0) == 0);
}

TEST_CASE("inspect: metis-like entropy below the random baseline") {
  Workspace w;
  const auto p = (w.root / "p.tsv").string();
  REQUIRE(cli({"partition", "--data", w.data.string(), "--clusters", "6", "--out", p}).code == 0);
  const auto r = cli({"inspect", "--data", w.data.string(), "--partition", p});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["mean_entropy"].get<double>() < j["random_baseline"]["mean_entropy"].get<double>());
  std::size_t total = 0;
  for (const auto& c : j["histogram"]["counts"]) total += c.get<std::size_t>();
  CHECK(total == 6);
  check_json_finite(j);
}

TEST_CASE("exit codes") {
  Workspace w;
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"partition", "--data", w.data.string(), "--out", "x"}).code == 2);
  CHECK(cli({"partition", "--data", w.data.string(), "--clusters", "2", "--method", "spectral", "--out",
             (w.root / "x").string()})
            .code == 2);
  CHECK(cli({"partition", "--data", (w.root / "nope").string(), "--clusters", "2", "--out", (w.root / "x").string()})
            .code == 1);
  CHECK(cli({"partition", "--data", w.data.string(), "--clusters", "1000", "--out", (w.root / "x").string()})
            .code == 1);
  const auto bad = w.config("bad.json", R"({"epochz":5})");
  const auto r = cli({"train", "--data", w.data.string(), "--config", bad, "--out", (w.root / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("epochz") != std::string::npos);
  const auto broken = w.config("broken.json", "{not json");
  CHECK(cli({"train", "--data", w.data.string(), "--config", broken, "--out", (w.root / "o").string()}).code == 2);
  CHECK(cli({"eval", "--data", w.data.string(), "--checkpoint", (w.root / "missing.json").string()}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}
