// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>

#include "forumdyn/ibp.hpp"

using namespace forumdyn;

TEST_CASE("zero mass gives no dishes") {
  for (int n : {1, 5, 30}) CHECK(sample_ibp(n, 0.0, std::uint64_t{3}).cols() == 0);
}

TEST_CASE("draws are binary with no empty columns and are seed-deterministic") {
  const MatrixXi f = sample_ibp(15, 3.0, std::uint64_t{8});
  CHECK(f.rows() == 15);
  CHECK(((f.array() == 0) || (f.array() == 1)).all());
  for (Eigen::Index k = 0; k < f.cols(); ++k) CHECK(f.col(k).sum() >= 1);
  CHECK(f == sample_ibp(15, 3.0, std::uint64_t{8}));
  CHECK_THROWS_AS(sample_ibp(0, 1.0, std::uint64_t{1}), Error);
  CHECK_THROWS_AS(sample_ibp(2, -1.0, std::uint64_t{1}), Error);
}

TEST_CASE("customers are exchangeable") {
  // Every customer's dish count is Poisson(alpha) regardless of position.
  Rng rng(21);
  const double alpha = 2.0;
  const int draws = 10000, n = 12;
  VectorXd first = VectorXd::Zero(draws), last = VectorXd::Zero(draws);
  for (int d = 0; d < draws; ++d) {
    const MatrixXi f = sample_ibp(n, alpha, rng);
    first(d) = f.row(0).sum();
    last(d) = f.row(n - 1).sum();
  }
  const double se = std::sqrt(alpha / draws);
  CHECK(std::abs(first.mean() - alpha) <= 3 * se);
  CHECK(std::abs(last.mean() - alpha) <= 3 * se);
  CHECK(std::abs(first.mean() - last.mean()) <= 3 * std::sqrt(2.0) * se);
}

TEST_CASE("finite beta-bernoulli mean") {
  Rng rng(22);
  const double alpha = 3.0;
  const int K = 10, draws = 10000;
  VectorXd m(draws);
  for (int d = 0; d < draws; ++d) m(d) = sample_beta_bernoulli(4, K, alpha, rng).cast<double>().mean();
  const double expect = (alpha / K) / (alpha / K + 1);
  const double se = std::sqrt((m.array() - m.mean()).square().sum() / (draws - 1) / draws);
  CHECK(std::abs(m.mean() - expect) <= 3 * se);
}

TEST_CASE("single-customer pmf is Poisson") {
  const double alpha = 1.7;
  for (int k = 0; k < 6; ++k) {
    const MatrixXi f = MatrixXi::Ones(1, k);
    CHECK(ibp_log_pmf(f, alpha) == doctest::Approx(-alpha + k * std::log(alpha) - std::lgamma(k + 1.0)));
  }
}

TEST_CASE("two-customer pmf sums to one over equivalence classes") {
  // Classes are counted by (only first, only second, both) columns.
  const double alpha = 1.3;
  double total = 0;
  for (int a = 0; a < 14; ++a)
    for (int b = 0; b < 14; ++b)
      for (int c = 0; c < 14; ++c) {
        MatrixXi f = MatrixXi::Zero(2, a + b + c);
        f.block(0, 0, 1, a).setOnes();
        f.block(1, a, 1, b).setOnes();
        f.block(0, a + b, 2, c).setOnes();
        total += std::exp(ibp_log_pmf(f, alpha));
      }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}
