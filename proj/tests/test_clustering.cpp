// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <random>

#include "forumdyn/clustering.hpp"
#include "oracles.hpp"

using namespace forumdyn;

TEST_CASE("single leaf") {
  const auto t = agglomerate(MatrixXd::Zero(1, 1));
  CHECK(t.leaves == 1);
  CHECK(t.merges.empty());
  CHECK(t.leaf_order == std::vector<int>{0});
  CHECK(cut(t, 2) == std::vector<int>{0});
  CHECK(to_newick(t, {"solo"}) == "solo;");
}

TEST_CASE("two tight pairs merge before any cross merge") {
  MatrixXd d(4, 4);
  d << 0, 5, 1, 6, 5, 0, 7, 2, 1, 7, 0, 5, 6, 2, 5, 0;
  for (auto link : {Linkage::Single, Linkage::Complete, Linkage::Average}) {
    const auto t = agglomerate(d, link);
    REQUIRE(t.merges.size() == 3);
    CHECK(t.merges[0].left == 0);
    CHECK(t.merges[0].right == 2);
    CHECK(t.merges[0].height == 1.0);
    CHECK(t.merges[1].left == 1);
    CHECK(t.merges[1].right == 3);
    CHECK(t.merges[2].size == 4);
    CHECK(cut(t, 2) == std::vector<int>{0, 1, 0, 1});
    CHECK(cut(t, 4) == std::vector<int>{0, 1, 2, 3});
    CHECK(cut(t, 1) == std::vector<int>{0, 0, 0, 0});
  }
  CHECK(agglomerate(d, Linkage::Average).merges[2].height == doctest::Approx((5 + 6 + 7 + 5) / 4.0));
  CHECK(agglomerate(d, Linkage::Single).merges[2].height == 5.0);
  CHECK(agglomerate(d, Linkage::Complete).merges[2].height == 7.0);
}

TEST_CASE("ties go to the smallest node pair") {
  const MatrixXd d = MatrixXd::Constant(3, 3, 1.0) - MatrixXd::Identity(3, 3);
  const auto t = agglomerate(d);
  CHECK(t.merges[0].left == 0);
  CHECK(t.merges[0].right == 1);
  CHECK(t.merges[1].left == 2);
  CHECK(t.merges[1].right == 3);
}

TEST_CASE("heights are monotone for average linkage on similarity distances") {
  Rng rng(41);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int n = 0; n < 30; ++n) {
    const int N = 2 + n % 9;
    MatrixXd sim(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j <= i; ++j) sim(i, j) = sim(j, i) = i == j ? 1.0 : u(rng);
    const auto t = cluster(sim, Linkage::Average);
    for (std::size_t m = 1; m < t.merges.size(); ++m) CHECK(t.merges[m].height >= t.merges[m - 1].height);
    CHECK(static_cast<int>(t.leaf_order.size()) == N);
    for (const auto& mg : t.merges) CHECK(mg.height >= 0.0);
  }
}

TEST_CASE("planted two-group partition") {
  MatrixXd sim = MatrixXd::Constant(6, 6, 0.05);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if ((i < 3) == (j < 3)) sim(i, j) = 0.8;
  sim.diagonal().setOnes();
  const auto labels = cut(cluster(sim), 2);
  CHECK(oracle::adjusted_rand_index(labels, {0, 0, 0, 1, 1, 1}) == 1.0);
}

TEST_CASE("newick output") {
  MatrixXd d(3, 3);
  d << 0, 2, 4, 2, 0, 4, 4, 4, 0;
  const auto t = agglomerate(d);
  CHECK(to_newick(t, {"a", "b", "c"}) == "(c:4,(a:2,b:2):2);");
  CHECK(to_newick(t, {"a b", "it's", "c"}) == "(c:4,('a b':2,'it''s':2):2);");
  CHECK(linkage_from_string(to_string(Linkage::Complete)) == Linkage::Complete);
  CHECK_THROWS_AS(linkage_from_string("ward"), Error);
  CHECK_THROWS_AS(agglomerate(MatrixXd(0, 0)), Error);
}
