// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <algorithm>
#include <set>

#include "forumdyn/bphmm.hpp"
#include "forumdyn/io.hpp"
#include "forumdyn/synthetic.hpp"
#include "oracles.hpp"

using namespace forumdyn;

namespace {

McmcConfig short_run(std::uint64_t seed, int sweeps = 150) {
  McmcConfig cfg;
  cfg.sweeps = sweeps;
  cfg.burn_in = sweeps / 2;
  cfg.seed = seed;
  return cfg;
}

synthetic::PlantedSeries small_planted(std::uint64_t seed, std::vector<int> gaps = {}) {
  synthetic::PlantedSeriesSpec spec;
  spec.series = 6;
  spec.weeks = 40;
  spec.seed = seed;
  spec.series_with_gaps = std::move(gaps);
  return synthetic::planted_series(spec);
}

std::vector<std::vector<int>> decoded(const BphmmModel& m) {
  std::vector<std::vector<int>> out;
  for (const auto& s : m.sequences) out.push_back(s.states);
  return out;
}

}  // namespace

TEST_CASE("config validation") {
  McmcConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.sweeps = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.alpha = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.variance_floor = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.birth_window = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("input errors") {
  CHECK_THROWS_AS(fit_bphmm({}, short_run(1)), Error);
  auto data = small_planted(1);
  auto zero = data.series;
  zero[1].observations.resize(0, 4);
  zero[1].post_counts.resize(0);
  CHECK_THROWS_AS(fit_bphmm(zero, short_run(1)), Error);
  auto mismatch = data.series;
  mismatch[2].observations.conservativeResize(Eigen::NoChange, 3);
  CHECK_THROWS_AS(fit_bphmm(mismatch, short_run(1)), Error);
}

TEST_CASE("sampler invariants hold after every sweep") {
  const auto data = small_planted(2, {3});
  BphmmSampler sampler(data.series, short_run(2));
  for (int sweep = 0; sweep < 60; ++sweep) {
    sampler.sweep();
    const BphmmSample s = sampler.sample();
    REQUIRE(s.features.cols() == static_cast<Eigen::Index>(s.states.size()));
    for (Eigen::Index k = 0; k < s.features.cols(); ++k) CHECK(s.features.col(k).sum() >= 1);
    CHECK(std::isfinite(s.log_posterior));
    for (std::size_t i = 0; i < s.transitions.size(); ++i) {
      const auto& tm = s.transitions[i];
      CHECK(!tm.states.empty());
      CHECK(std::abs(tm.init.sum() - 1.0) <= 1e-12);
      for (Eigen::Index r = 0; r < tm.trans.rows(); ++r) CHECK(std::abs(tm.trans.row(r).sum() - 1.0) <= 1e-12);
      CHECK(tm.trans.minCoeff() >= 0.0);
      for (int z : s.assignments[i]) {
        CHECK(tm.local_index(z) >= 0);
        CHECK(s.features(static_cast<Eigen::Index>(i), z) == 1);
      }
    }
    for (const auto& st : s.states) CHECK(st.var.minCoeff() >= 1e-6);
  }
}

TEST_CASE("constant series collapses to one state") {
  ForumSeries s;
  s.forum_id = "flat";
  s.weeks = {10, 39};
  s.observations = MatrixXd::Constant(30, 3, 1.0 / 3);
  s.post_counts = Eigen::VectorXi::Constant(30, 5);
  const BphmmModel m = fit_bphmm({s}, short_run(3, 100));
  CHECK(m.state_count() == 1);
  const auto& seq = m.sequences[0].states;
  CHECK(std::all_of(seq.begin(), seq.end(), [&](int z) { return z == seq[0]; }));
}

TEST_CASE("fits are deterministic for a seed") {
  const auto data = small_planted(4);
  const auto a = fit_bphmm(data.series, short_run(9, 80));
  const auto b = fit_bphmm(data.series, short_run(9, 80));
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("small planted recovery, diagonal and full covariance") {
  const auto data = small_planted(5);
  for (auto kind : {CovarianceKind::Diagonal, CovarianceKind::Full}) {
    auto cfg = short_run(6, 200);
    cfg.covariance = kind;
    const BphmmModel m = fit_bphmm(data.series, cfg);
    CHECK(oracle::matched_accuracy(data.labels, decoded(m)) >= 0.9);
    CHECK(m.state_count() >= 3);
    CHECK(m.state_count() <= 6);
    CHECK(m.features.cols() == m.state_count());
    for (int i = 0; i < m.series_count(); ++i) {
      std::set<int> used(m.sequences[static_cast<std::size_t>(i)].states.begin(),
                         m.sequences[static_cast<std::size_t>(i)].states.end());
      // After compaction every active state of a series is visited.
      CHECK(used == std::set<int>(m.transitions[static_cast<std::size_t>(i)].states.begin(),
                                  m.transitions[static_cast<std::size_t>(i)].states.end()));
      for (int z : used) CHECK(m.features(i, z) == 1);
      CHECK(decode(m, i, data.series[static_cast<std::size_t>(i)].observations).states ==
            m.sequences[static_cast<std::size_t>(i)].states);
    }
    // Relabeled in order of first appearance.
    CHECK(m.sequences[0].states[0] == 0);
  }
}

TEST_CASE("empty weeks of different forums share one state") {
  const auto data = small_planted(7, {1, 4});
  const BphmmModel m = fit_bphmm(data.series, short_run(8, 200));
  REQUIRE(m.empty_state.has_value());
  for (int i : {1, 4}) {
    const auto& s = data.series[static_cast<std::size_t>(i)];
    for (Eigen::Index t = 0; t < s.length(); ++t)
      if (s.post_counts(t) == 0) CHECK(m.sequences[static_cast<std::size_t>(i)].states[static_cast<std::size_t>(t)] == *m.empty_state);
  }
  std::vector<std::vector<int>> labels = data.labels;
  CHECK(oracle::matched_accuracy(labels, decoded(m)) >= 0.9);
}

TEST_CASE("decode with a hand-built model") {
  BphmmModel m;
  m.forum_ids = {"x"};
  m.features = MatrixXi::Ones(1, 2);
  GlobalState a, b;
  a.mean = VectorXd::Constant(2, 0.0);
  a.var = VectorXd::Constant(2, 0.01);
  b.mean = VectorXd::Constant(2, 5.0);
  b.var = VectorXd::Constant(2, 0.01);
  m.states = {a, b};
  TransitionModel tm;
  tm.states = {0, 1};
  tm.init = VectorXd::Constant(2, 0.5);
  tm.trans = MatrixXd::Constant(2, 2, 0.5);
  m.transitions = {tm};
  m.sequences = {{"x", {}}};
  const MatrixXd obs = MatrixXd::Zero(6, 2);
  CHECK(decode(m, 0, obs).states == std::vector<int>(6, 0));
  CHECK(decode(m, 0, obs).forum_id == "x");
  CHECK_THROWS_AS(decode(m, 1, obs), Error);
  CHECK_THROWS_AS(decode(m, -1, obs), Error);
}
