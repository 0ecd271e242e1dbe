// Apache License, Version 2.0, refer to LICENSE.txt

// Independent reference implementations used by the tests. Each is the
// slow, obvious version of something the library computes another way.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "forumdyn/common.hpp"
#include "forumdyn/corpus.hpp"

namespace oracle {

using forumdyn::MatrixXd;
using forumdyn::VectorXd;

/// Log joint probability of a path and the observations.
inline double path_logprob(const std::vector<int>& path, const MatrixXd& log_emission, const VectorXd& init,
                           const MatrixXd& trans) {
  double lp = std::log(init(path[0])) + log_emission(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t)
    lp += std::log(trans(path[t - 1], path[t])) + log_emission(static_cast<Eigen::Index>(t), path[t]);
  return lp;
}

/// Argmax over all S^W paths by enumeration.
inline std::vector<int> brute_force_decode(const MatrixXd& log_emission, const VectorXd& init,
                                           const MatrixXd& trans) {
  const auto W = static_cast<std::size_t>(log_emission.rows());
  const int S = static_cast<int>(log_emission.cols());
  std::vector<int> path(W, 0), best;
  double best_lp = -std::numeric_limits<double>::infinity();
  while (true) {
    const double lp = path_logprob(path, log_emission, init, trans);
    if (lp > best_lp) {
      best_lp = lp;
      best = path;
    }
    std::size_t t = W;
    while (t > 0 && path[t - 1] == S - 1) path[--t] = 0;
    if (t == 0) break;
    ++path[t - 1];
  }
  return best;
}

/// Log marginal likelihood by summing over every path.
inline double brute_force_loglik(const MatrixXd& log_emission, const VectorXd& init, const MatrixXd& trans) {
  const auto W = static_cast<std::size_t>(log_emission.rows());
  const int S = static_cast<int>(log_emission.cols());
  std::vector<int> path(W, 0);
  double total = 0.0;
  while (true) {
    total += std::exp(path_logprob(path, log_emission, init, trans));
    std::size_t t = W;
    while (t > 0 && path[t - 1] == S - 1) path[--t] = 0;
    if (t == 0) break;
    ++path[t - 1];
  }
  return std::log(total);
}

inline double cosine(const VectorXd& a, const VectorXd& b) { return a.dot(b) / (a.norm() * b.norm()); }

/// Greedy one-to-one matching of rows by cosine similarity: repeatedly take
/// the most similar unmatched pair. Returns the matched cosines.
inline std::vector<double> greedy_cosine_matching(const MatrixXd& truth, const MatrixXd& estimate) {
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < truth.rows(); ++i)
    for (Eigen::Index j = 0; j < estimate.rows(); ++j)
      pairs.emplace_back(cosine(truth.row(i).transpose(), estimate.row(j).transpose()), i, j);
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::set<Eigen::Index> used_i, used_j;
  std::vector<double> out;
  for (const auto& [c, i, j] : pairs) {
    if (used_i.count(i) || used_j.count(j)) continue;
    used_i.insert(i);
    used_j.insert(j);
    out.push_back(c);
  }
  return out;
}

/// Fraction of positions correctly labeled under the best injective map from
/// predicted labels to true labels. Positions whose true label is negative
/// are skipped.
inline double matched_accuracy(const std::vector<std::vector<int>>& truth,
                               const std::vector<std::vector<int>>& predicted) {
  std::map<int, std::map<int, int>> counts;  // predicted -> truth -> n
  std::set<int> true_labels;
  int total = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (std::size_t t = 0; t < truth[i].size(); ++t) {
      if (truth[i][t] < 0) continue;
      ++counts[predicted[i][t]][truth[i][t]];
      true_labels.insert(truth[i][t]);
      ++total;
    }
  std::vector<int> preds;
  for (const auto& [p, _] : counts) preds.push_back(p);
  const std::vector<int> labels(true_labels.begin(), true_labels.end());
  // Exhaustive search: each predicted label maps to an unused true label or nothing.
  int best = 0;
  std::vector<char> used(labels.size(), 0);
  auto search = [&](auto&& self, std::size_t k, int acc) -> void {
    if (k == preds.size()) {
      best = std::max(best, acc);
      return;
    }
    self(self, k + 1, acc);
    for (std::size_t l = 0; l < labels.size(); ++l) {
      if (used[l]) continue;
      used[l] = 1;
      const auto& row = counts[preds[k]];
      const auto it = row.find(labels[l]);
      self(self, k + 1, acc + (it == row.end() ? 0 : it->second));
      used[l] = 0;
    }
  };
  search(search, 0, 0);
  return total ? static_cast<double>(best) / total : 1.0;
}

/// Adjusted Rand index of two flat labelings.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> nij;
  std::map<int, double> ai, bj;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ++nij[{a[k], b[k]}];
    ++ai[a[k]];
    ++bj[b[k]];
  }
  auto c2 = [](double x) { return x * (x - 1) / 2; };
  double sum_ij = 0, sum_a = 0, sum_b = 0;
  for (const auto& [_, v] : nij) sum_ij += c2(v);
  for (const auto& [_, v] : ai) sum_a += c2(v);
  for (const auto& [_, v] : bj) sum_b += c2(v);
  const double expected = sum_a * sum_b / c2(static_cast<double>(a.size()));
  const double max_index = (sum_a + sum_b) / 2;
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

/// Mean over rows of (1 - self-transition) after deleting `excluded` and
/// renormalizing what remains. Rows left with no mass are skipped.
inline std::optional<double> direct_volatility(const MatrixXd& trans, std::optional<int> excluded) {
  double total = 0;
  int rows = 0;
  for (int r = 0; r < trans.rows(); ++r) {
    if (excluded && r == *excluded) continue;
    double mass = 0, self = 0;
    for (int c = 0; c < trans.cols(); ++c) {
      if (excluded && c == *excluded) continue;
      mass += trans(r, c);
      if (c == r) self = trans(r, c);
    }
    if (mass <= 0) continue;
    total += 1.0 - self / mass;
    ++rows;
  }
  if (rows == 0) return std::nullopt;
  return total / rows;
}

/// -sum p log2 q.
inline double direct_cross_entropy(const VectorXd& p, const VectorXd& q) {
  double h = 0;
  for (Eigen::Index x = 0; x < p.size(); ++x)
    if (p(x) > 0) h -= p(x) * std::log2(q(x));
  return h;
}

inline double shannon_entropy_bits(const VectorXd& p) { return direct_cross_entropy(p, p); }

/// Number of documents containing each token id.
inline std::vector<std::size_t> recount_doc_frequency(const forumdyn::ProcessedCorpus& c) {
  std::vector<std::size_t> df(c.vocabulary.size(), 0);
  for (const auto& d : c.documents) {
    std::set<int> seen(d.tokens.begin(), d.tokens.end());
    for (int t : seen) ++df[static_cast<std::size_t>(t)];
  }
  return df;
}

/// Random row-stochastic matrix with strictly positive entries.
template <typename Urng>
MatrixXd random_stochastic(Eigen::Index rows, Eigen::Index cols, Urng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = u(rng);
    m.row(r) /= m.row(r).sum();
  }
  return m;
}

}  // namespace oracle
