#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"

#include "cgcn/checkpoint.hpp"
#include "cgcn/error.hpp"
#include "cgcn/optimizer.hpp"

using namespace cgcn;

TEST_CASE("one Adam step from w=0, g=1") {
  std::vector<DenseMatrix> w{DenseMatrix(1, 1)};
  auto st = AdamState::for_weights(w);
  DenseMatrix g(1, 1);
  g(0, 0) = 1.0;
  adam_step(st, w, {g});
  // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps).
  const double want = -0.01 / (1.0 + 1e-8);
  CHECK(w[0](0, 0) == doctest::Approx(want).epsilon(1e-15));
  CHECK(st.step == 1);
}

TEST_CASE("zero gradient leaves fresh weights unchanged") {
  std::vector<DenseMatrix> w{oracle::random_dense(3, 4, 1)};
  const auto before = w;
  auto st = AdamState::for_weights(w);
  adam_step(st, w, {DenseMatrix(3, 4)});
  CHECK(w == before);
}

TEST_CASE("non-finite gradient aborts without touching anything") {
  std::vector<DenseMatrix> w{oracle::random_dense(2, 2, 1), oracle::random_dense(2, 2, 2)};
  auto st = AdamState::for_weights(w);
  adam_step(st, w, {oracle::random_dense(2, 2, 3), oracle::random_dense(2, 2, 4)});
  const auto w_before = w;
  const auto st_before = st;
  DenseMatrix bad = oracle::random_dense(2, 2, 5);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(adam_step(st, w, {oracle::random_dense(2, 2, 6), bad}), NumericError);
  CHECK(w == w_before);
  CHECK(st == st_before);
  CHECK_THROWS_AS(adam_step(st, w, {oracle::random_dense(2, 2, 6)}), InputError);
}

TEST_CASE("per-coordinate step bounded by lr * 10 and runs are deterministic") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    std::vector<DenseMatrix> w{DenseMatrix(4, 4)};
    std::vector<DenseMatrix> w2 = w;
    auto st = AdamState::for_weights(w);
    auto st2 = st;
    Rng rng(s);
    for (int it = 0; it < 300; ++it) {
      DenseMatrix g(4, 4);
      // Heavy-tailed stream with rare huge spikes after long quiet stretches.
      for (double& v : g.values()) {
        const double u = uniform01(rng);
        v = (u < 0.01 ? 1e6 : (u < 0.5 ? 1e-6 : -0.3)) * (uniform01(rng) < 0.5 ? 1 : -1);
      }
      const auto prev = w[0];
      adam_step(st, w, {g});
      adam_step(st2, w2, {g});
      for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(w[0].values()[i] - prev.values()[i]) <= 0.01 * 10);
      for (const auto& v : st.v)
        for (double e : v.values()) CHECK(e >= 0.0);
    }
    CHECK(w == w2);
    CHECK(st == st2);
  }
}

TEST_CASE("checkpoint round trip is bit exact, optimizer state included") {
  auto m = GcnModel::init({5, 7, 3}, Variant::kDiagEnhanced, 0.37, Task::kMultilabel, 11);
  m.weights[0](0, 0) = 1.0 / 3.0;
  m.weights[0](1, 1) = -0.0;
  m.weights[0](2, 2) = 5e-324;
  auto st = AdamState::for_weights(m.weights, 0.003);
  adam_step(st, m.weights, {oracle::random_dense(5, 7, 1), oracle::random_dense(7, 3, 2)});
  Checkpoint c{m, NormMode::kSym, false, st};
  const auto path = std::filesystem::temp_directory_path() / "cgcn_ckpt_test.json";
  write_checkpoint(c, path);
  const auto r = read_checkpoint(path);
  std::filesystem::remove(path);
  CHECK(r.model.dims == m.dims);
  CHECK(r.model.variant == m.variant);
  CHECK(r.model.lambda == m.lambda);
  CHECK(r.model.task == m.task);
  CHECK(r.norm_mode == NormMode::kSym);
  CHECK_FALSE(r.feature_norm);
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t i = 0; i < m.weights[l].values().size(); ++i)
      CHECK(std::bit_cast<std::uint64_t>(r.model.weights[l].values()[i]) ==
            std::bit_cast<std::uint64_t>(m.weights[l].values()[i]));
  REQUIRE(r.adam.has_value());
  CHECK(*r.adam == st);
}

TEST_CASE("checkpoint rejects bad content") {
  auto m = GcnModel::init({2, 2}, Variant::kPlain, 1.0, Task::kMulticlass, 1);
  auto j = to_json(Checkpoint{m, NormMode::kRow, true, std::nullopt});
  CHECK_NOTHROW(checkpoint_from_json(j));
  auto bad_version = j;
  bad_version["version"] = 99;
  CHECK_THROWS_AS(checkpoint_from_json(bad_version), InputError);
  auto bad_shape = j;
  bad_shape["dims"] = {2, 3};
  CHECK_THROWS_AS(checkpoint_from_json(bad_shape), InputError);
}
