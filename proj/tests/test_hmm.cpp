// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <random>

#include "forumdyn/hmm.hpp"
#include "oracles.hpp"

using namespace forumdyn;

namespace {

struct Instance {
  MatrixXd log_emission;
  VectorXd init;
  MatrixXd trans;
};

Instance random_instance(Rng& rng, int W, int S) {
  std::normal_distribution<double> g(0.0, 2.0);
  Instance in;
  in.log_emission.resize(W, S);
  for (int t = 0; t < W; ++t)
    for (int s = 0; s < S; ++s) in.log_emission(t, s) = g(rng);
  in.init = oracle::random_stochastic(1, S, rng).row(0).transpose();
  in.trans = oracle::random_stochastic(S, S, rng);
  return in;
}

}  // namespace

TEST_CASE("forward log-likelihood matches path enumeration") {
  Rng rng(1);
  for (int n = 0; n < 50; ++n) {
    const auto in = random_instance(rng, 1 + n % 6, 1 + n % 4);
    CHECK(forward_loglik(in.log_emission, in.init, in.trans) ==
          doctest::Approx(oracle::brute_force_loglik(in.log_emission, in.init, in.trans)).epsilon(1e-10));
  }
}

TEST_CASE("filtered distributions are normalized") {
  Rng rng(2);
  const auto in = random_instance(rng, 8, 3);
  MatrixXd filtered;
  forward_loglik(in.log_emission, in.init, in.trans, &filtered);
  for (Eigen::Index t = 0; t < filtered.rows(); ++t) CHECK(filtered.row(t).sum() == doctest::Approx(1.0));
}

TEST_CASE("forward pass survives extreme log-likelihoods") {
  MatrixXd le(3, 2);
  le << -2000, -2010, -1990, -3000, -2500, -2500;
  const VectorXd init = VectorXd::Constant(2, 0.5);
  const MatrixXd trans = MatrixXd::Constant(2, 2, 0.5);
  const double ll = forward_loglik(le, init, trans);
  CHECK(std::isfinite(ll));
  CHECK(ll == doctest::Approx(oracle::brute_force_loglik(le.array() + 2000.0, init, trans) - 3 * 2000.0));
}

TEST_CASE("impossible sequences have zero likelihood") {
  MatrixXd le(2, 2);
  le << 0, 0, 0, 0;
  VectorXd init(2);
  init << 1, 0;
  MatrixXd trans = MatrixXd::Identity(2, 2);
  le(1, 0) = -std::numeric_limits<double>::infinity();
  CHECK(forward_loglik(le, init, trans) == -std::numeric_limits<double>::infinity());
  Rng rng(3);
  CHECK_THROWS_AS(ffbs(le, init, trans, rng), Error);
}

TEST_CASE("viterbi equals exhaustive decoding") {
  Rng rng(4);
  for (int n = 0; n < 100; ++n) {
    const auto in = random_instance(rng, 1 + n % 6, 1 + n % 4);
    CHECK(viterbi(in.log_emission, in.init, in.trans) ==
          oracle::brute_force_decode(in.log_emission, in.init, in.trans));
  }
}

TEST_CASE("viterbi works in single precision") {
  Rng rng(5);
  const auto in = random_instance(rng, 5, 3);
  const Eigen::MatrixXf le = in.log_emission.cast<float>();
  const Eigen::VectorXf init = in.init.cast<float>();
  const Eigen::MatrixXf trans = in.trans.cast<float>();
  CHECK(viterbi(le, init, trans) == viterbi(in.log_emission, in.init, in.trans));
}

TEST_CASE("viterbi ties go to the lower index") {
  const MatrixXd le = MatrixXd::Zero(3, 2);
  const VectorXd init = VectorXd::Constant(2, 0.5);
  const MatrixXd trans = MatrixXd::Constant(2, 2, 0.5);
  CHECK(viterbi(le, init, trans) == std::vector<int>{0, 0, 0});
  CHECK(viterbi(MatrixXd(0, 2), init, trans).empty());
}

TEST_CASE("ffbs samples the smoothing marginals") {
  Rng rng(6);
  const auto in = random_instance(rng, 3, 2);
  // Exact marginals P(z_t = 1 | y) by enumeration.
  std::vector<double> exact(3, 0.0);
  double total = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const std::vector<int> path = {a, b, c};
        const double p = std::exp(oracle::path_logprob(path, in.log_emission, in.init, in.trans));
        total += p;
        for (int t = 0; t < 3; ++t) exact[static_cast<std::size_t>(t)] += path[static_cast<std::size_t>(t)] * p;
      }
  const int draws = 20000;
  std::vector<double> freq(3, 0.0);
  for (int n = 0; n < draws; ++n) {
    const auto z = ffbs(in.log_emission, in.init, in.trans, rng);
    for (int t = 0; t < 3; ++t) freq[static_cast<std::size_t>(t)] += z[static_cast<std::size_t>(t)];
  }
  for (int t = 0; t < 3; ++t) {
    const double p = exact[static_cast<std::size_t>(t)] / total;
    const double se = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(freq[static_cast<std::size_t>(t)] / draws - p) <= 4 * se + 1e-12);
  }
}

TEST_CASE("seq_loglik") {
  VectorXd init(2);
  init << 1.0, 0.0;
  const std::vector<int> aaa = {0, 0, 0};
  CHECK(seq_loglik(std::span<const int>(aaa), init, MatrixXd::Identity(2, 2)) == 0.0);
  const std::vector<int> ab = {0, 1};
  CHECK(seq_loglik(std::span<const int>(ab), VectorXd::Constant(2, 0.5), MatrixXd::Constant(2, 2, 0.5)) ==
        doctest::Approx(std::log(0.5)));
  const std::vector<int> empty, bad = {0, 2};
  CHECK_THROWS_AS(seq_loglik(std::span<const int>(empty), init, MatrixXd::Identity(2, 2)), Error);
  CHECK_THROWS_AS(seq_loglik(std::span<const int>(bad), init, MatrixXd::Identity(2, 2)), Error);
}
