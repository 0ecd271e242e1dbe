// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forumdyn/bphmm.hpp"
#include "forumdyn/common.hpp"
#include "forumdyn/timeseries.hpp"

namespace forumdyn {

// ---------------------------------------------------------------------------
// Formula kernels

/// H(p, q) = -sum_x p(x) log2 q(x), in bits. Terms with p(x) = 0 contribute 0.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar cross_entropy_bits(const Eigen::MatrixBase<DerivedP>& p,
                                             const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  Scalar h = 0;
  for (Eigen::Index x = 0; x < p.size(); ++x)
    if (p(x) > 0) h -= p(x) * std::log2(q(x));
  return h;
}

/// Mean over rows of the off-diagonal row mass after dropping `excluded`
/// (a local row/column index) and renormalizing what remains. Rows whose
/// remaining mass is zero are skipped. Empty when no row is left.
template <typename Derived>
std::optional<typename Derived::Scalar> off_diagonal_volatility(const Eigen::MatrixBase<Derived>& trans,
                                                                std::optional<Eigen::Index> excluded) {
  using Scalar = typename Derived::Scalar;
  Scalar total = 0;
  int rows = 0;
  for (Eigen::Index r = 0; r < trans.rows(); ++r) {
    if (excluded && r == *excluded) continue;
    Scalar mass = 0;
    for (Eigen::Index c = 0; c < trans.cols(); ++c)
      if (!(excluded && c == *excluded)) mass += trans(r, c);
    if (!(mass > 0)) continue;
    total += (mass - trans(r, r)) / mass;
    ++rows;
  }
  if (rows == 0) return std::nullopt;
  return total / static_cast<Scalar>(rows);
}

/// Trailing rolling mean; the first window - 1 points average what exists.
std::vector<double> smooth(std::span<const double> values, int window = 4);

// ---------------------------------------------------------------------------
// Similarity

/// Chain of series j expanded to every global state: exhibited rows become
/// (T_j + lambda) / (1 + K lambda) with zeros for unexhibited targets, rows
/// of unexhibited states are uniform, and the initial distribution is
/// smoothed the same way.
void expanded_chain(const BphmmModel& model, int series_index, double lambda, VectorXd& init,
                    MatrixXd& trans);

struct SimilarityMatrix {
  std::vector<std::string> forum_ids;
  MatrixXd values;  // Sim(i, j)
  double lambda = 1e-3;
};

/// Sim(i, j) = (exp(seq_loglik(seq_i | chain_j)) + exp(seq_loglik(seq_j | chain_i))) / 2,
/// with length-normalized log likelihoods.
SimilarityMatrix similarity_matrix(const BphmmModel& model, double lambda = 1e-3);

// ---------------------------------------------------------------------------
// Volatility

/// Mean leave probability of a forum's chain with the empty state removed.
/// Empty when the forum only exhibits the empty state.
std::optional<double> volatility_hmm(const BphmmModel& model, int forum_index);

struct CrossEntropySeries {
  std::string forum_id;
  std::vector<std::int64_t> weeks;  // week indices of the nonempty weeks
  std::vector<double> values;       // H(P_week, Q) in bits
  VectorXd reference;               // Q after flooring and renormalization
};

/// Weekly cross entropy against the forum's mean nonempty topic vector Q,
/// floored at epsilon and renormalized. Empty weeks have no value.
CrossEntropySeries cross_entropy_series(const ForumSeries& series, double epsilon = 1e-10);

struct VolatilityEntry {
  std::string forum_id;
  std::optional<double> hmm;
  std::optional<double> cross_entropy;
  int hmm_rank = 0;  // 1 = most volatile; missing values rank last
  int ce_rank = 0;
};

struct VolatilityReport {
  std::vector<VolatilityEntry> entries;  // in series order
};

VolatilityReport volatility_report(const BphmmModel& model, const std::vector<ForumSeries>& series,
                                   double epsilon = 1e-10);

// ---------------------------------------------------------------------------
// Anomalies

struct ForumWeek {
  std::string forum_id;
  std::int64_t week = 0;  // week index
  bool operator==(const ForumWeek&) const = default;
};

struct RareState {
  int state = 0;
  double occupancy = 0.0;  // fraction of nonempty forum-weeks
  std::vector<ForumWeek> occurrences;
};

/// States (other than the empty state) whose decoded share of nonempty
/// forum-weeks is strictly below `threshold`, with every occurrence.
std::vector<RareState> rare_states(const BphmmModel& model, const std::vector<ForumSeries>& series,
                                   double threshold = 0.01);

struct TransitionEvent {
  std::string forum_id;
  std::int64_t week = 0;  // week index of the first week in the new state
  int position = 0;       // offset within the series
  int from_state = 0;
  int to_state = 0;
  std::optional<double> volatility;
};

/// Every decoded state change s_t != s_{t-1} that does not touch the empty
/// state. Ordered by forum volatility ascending (missing last), then forum
/// id, then week.
std::vector<TransitionEvent> transition_events(const BphmmModel& model,
                                               const std::vector<ForumSeries>& series);

/// Positions of one state sequence where the state changes, skipping hops
/// into or out of `excluded`.
std::vector<int> change_points(std::span<const int> states, std::optional<int> excluded);

struct ActivityPeak {
  std::string forum_id;
  std::int64_t week = 0;
  int position = 0;
  double z_score = 0.0;
};

/// Weeks whose post count exceeds mean + z_threshold * stdev (population) of
/// the forum's weekly counts. Series shorter than 8 weeks yield nothing.
std::vector<ActivityPeak> activity_peaks(const ForumSeries& series, double z_threshold = 3.0);

struct AnomalyReport {
  std::vector<RareState> rare;
  std::vector<TransitionEvent> events;
  std::vector<ActivityPeak> peaks;
};

AnomalyReport anomaly_report(const BphmmModel& model, const std::vector<ForumSeries>& series,
                             double rare_threshold = 0.01, double z_threshold = 3.0);

}  // namespace forumdyn
