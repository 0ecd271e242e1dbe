// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "forumdyn/common.hpp"

namespace forumdyn {

// Dense HMM routines over S local states. Emission terms are passed as a
// W x S matrix of natural-log likelihoods; `init` and `trans` are
// probabilities (rows of `trans` sum to one).

/// log p(y_1..W) by the scaled forward recursion. When `filtered` is given it
/// receives the per-step normalized filtering distributions (W x S).
template <typename DerivedL, typename DerivedP, typename DerivedT>
typename DerivedL::Scalar forward_loglik(const Eigen::MatrixBase<DerivedL>& log_emission,
                                         const Eigen::MatrixBase<DerivedP>& init,
                                         const Eigen::MatrixBase<DerivedT>& trans,
                                         MatrixX<typename DerivedL::Scalar>* filtered = nullptr) {
  using Scalar = typename DerivedL::Scalar;
  const Eigen::Index w = log_emission.rows();
  const Eigen::Index s = log_emission.cols();
  if (filtered) filtered->resize(w, s);
  Scalar total = 0;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> alpha(s);
  for (Eigen::Index t = 0; t < w; ++t) {
    const Scalar shift = log_emission.row(t).maxCoeff();
    if (!std::isfinite(shift)) return -std::numeric_limits<Scalar>::infinity();
    const auto emis = (log_emission.row(t).array() - shift).exp();
    if (t == 0)
      alpha = init.transpose().array() * emis;
    else
      alpha = (alpha * trans).array() * emis;
    const Scalar c = alpha.sum();
    if (!(c > 0)) return -std::numeric_limits<Scalar>::infinity();
    alpha /= c;
    total += std::log(c) + shift;
    if (filtered) filtered->row(t) = alpha;
  }
  return total;
}

/// Forward-filter backward-sample. Returns local state indices.
template <typename DerivedL, typename DerivedP, typename DerivedT, typename Urng>
std::vector<int> ffbs(const Eigen::MatrixBase<DerivedL>& log_emission,
                      const Eigen::MatrixBase<DerivedP>& init,
                      const Eigen::MatrixBase<DerivedT>& trans, Urng& rng) {
  using Scalar = typename DerivedL::Scalar;
  MatrixX<Scalar> filtered;
  const Eigen::Index w = log_emission.rows();
  std::vector<int> z(static_cast<std::size_t>(w));
  if (w == 0) return z;
  if (!std::isfinite(forward_loglik(log_emission, init, trans, &filtered)))
    throw Error("ffbs: sequence has zero likelihood");
  auto draw = [&rng](const auto& weights) {
    std::uniform_real_distribution<double> u(0.0, static_cast<double>(weights.sum()));
    double x = u(rng), acc = 0.0;
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
      acc += static_cast<double>(weights(k));
      if (x < acc) return static_cast<int>(k);
    }
    for (Eigen::Index k = weights.size() - 1; k >= 0; --k)
      if (weights(k) > 0) return static_cast<int>(k);
    return 0;
  };
  z[w - 1] = draw(filtered.row(w - 1));
  for (Eigen::Index t = w - 2; t >= 0; --t) {
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> p =
        filtered.row(t).array() * trans.col(z[t + 1]).transpose().array();
    z[t] = draw(p);
  }
  return z;
}

/// Most probable state path. Ties go to the lower local index, both for the
/// final state and for each back-pointer.
template <typename DerivedL, typename DerivedP, typename DerivedT>
std::vector<int> viterbi(const Eigen::MatrixBase<DerivedL>& log_emission,
                         const Eigen::MatrixBase<DerivedP>& init,
                         const Eigen::MatrixBase<DerivedT>& trans) {
  using Scalar = typename DerivedL::Scalar;
  const Eigen::Index w = log_emission.rows();
  const Eigen::Index s = log_emission.cols();
  std::vector<int> path(static_cast<std::size_t>(w));
  if (w == 0) return path;
  const MatrixX<Scalar> log_trans = trans.array().log();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> delta = init.array().log() + log_emission.row(0).transpose().array();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> next(s);
  Eigen::MatrixXi back(w, s);
  for (Eigen::Index t = 1; t < w; ++t) {
    for (Eigen::Index j = 0; j < s; ++j) {
      Scalar best = -std::numeric_limits<Scalar>::infinity();
      int arg = 0;
      for (Eigen::Index i = 0; i < s; ++i) {
        const Scalar v = delta(i) + log_trans(i, j);
        if (v > best) {
          best = v;
          arg = static_cast<int>(i);
        }
      }
      back(t, j) = arg;
      next(j) = best + log_emission(t, j);
    }
    delta.swap(next);
  }
  int last = 0;
  for (Eigen::Index j = 1; j < s; ++j)
    if (delta(j) > delta(last)) last = static_cast<int>(j);
  path[w - 1] = last;
  for (Eigen::Index t = w - 1; t > 0; --t) path[t - 1] = back(t, path[t]);
  return path;
}

/// Length-normalized log probability of a state sequence under a Markov
/// chain: (log init(s_1) + sum_t log trans(s_t, s_{t+1})) / W.
template <typename DerivedP, typename DerivedT>
typename DerivedT::Scalar seq_loglik(std::span<const int> seq, const Eigen::MatrixBase<DerivedP>& init,
                                     const Eigen::MatrixBase<DerivedT>& trans) {
  using Scalar = typename DerivedT::Scalar;
  if (seq.empty()) throw Error("seq_loglik: empty sequence");
  const auto n = trans.rows();
  for (int s : seq)
    if (s < 0 || s >= n || s >= init.size())
      throw Error("seq_loglik: state id " + std::to_string(s) + " outside the transition matrix");
  Scalar total = std::log(init(seq[0]));
  for (std::size_t t = 1; t < seq.size(); ++t) total += std::log(trans(seq[t - 1], seq[t]));
  return total / static_cast<Scalar>(seq.size());
}

}  // namespace forumdyn
