// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/analysis.hpp"

#include <algorithm>
#include <numeric>

#include "forumdyn/hmm.hpp"

namespace forumdyn {

std::vector<double> smooth(std::span<const double> values, int window) {
  if (window < 1) throw Error("smooth: window must be >= 1");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    sum += values[t];
    if (t >= static_cast<std::size_t>(window)) sum -= values[t - static_cast<std::size_t>(window)];
    const auto n = std::min<std::size_t>(t + 1, static_cast<std::size_t>(window));
    out[t] = sum / static_cast<double>(n);
  }
  return out;
}

void expanded_chain(const BphmmModel& model, int series_index, double lambda, VectorXd& init,
                    MatrixXd& trans) {
  if (!(lambda > 0.0)) throw Error("similarity: lambda must be positive");
  const auto& tm = model.transitions.at(static_cast<std::size_t>(series_index));
  const Eigen::Index k = model.state_count();
  const double norm = 1.0 + static_cast<double>(k) * lambda;
  init = VectorXd::Constant(k, lambda);
  trans = MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k));
  for (std::size_t a = 0; a < tm.states.size(); ++a) {
    const int ga = tm.states[a];
    init(ga) += tm.init(static_cast<Eigen::Index>(a));
    trans.row(ga).setConstant(lambda);
    for (std::size_t b = 0; b < tm.states.size(); ++b)
      trans(ga, tm.states[b]) += tm.trans(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    trans.row(ga) /= norm;
  }
  init /= norm;
}

SimilarityMatrix similarity_matrix(const BphmmModel& model, double lambda) {
  const auto n = static_cast<Eigen::Index>(model.sequences.size());
  std::vector<VectorXd> inits(static_cast<std::size_t>(n));
  std::vector<MatrixXd> chains(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j)
    expanded_chain(model, static_cast<int>(j), lambda, inits[static_cast<std::size_t>(j)],
                   chains[static_cast<std::size_t>(j)]);
  // lik(i, j) = p(seq_i | chain_j), geometric mean per step
  MatrixXd lik(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      lik(i, j) = std::exp(seq_loglik(std::span<const int>(model.sequences[static_cast<std::size_t>(i)].states),
                                      inits[static_cast<std::size_t>(j)], chains[static_cast<std::size_t>(j)]));
  SimilarityMatrix sim;
  sim.forum_ids = model.forum_ids;
  sim.lambda = lambda;
  sim.values = 0.5 * (lik + lik.transpose());
  return sim;
}

std::optional<double> volatility_hmm(const BphmmModel& model, int forum_index) {
  if (forum_index < 0 || forum_index >= static_cast<int>(model.transitions.size()))
    throw Error("volatility_hmm: forum index out of range");
  const auto& tm = model.transitions[static_cast<std::size_t>(forum_index)];
  std::optional<Eigen::Index> excluded;
  if (model.empty_state) {
    const int local = tm.local_index(*model.empty_state);
    if (local >= 0) excluded = local;
  }
  return off_diagonal_volatility(tm.trans, excluded);
}

CrossEntropySeries cross_entropy_series(const ForumSeries& series, double epsilon) {
  CrossEntropySeries out;
  out.forum_id = series.forum_id;
  VectorXd q = VectorXd::Zero(series.dim());
  int nonempty = 0;
  for (Eigen::Index t = 0; t < series.length(); ++t) {
    if (series.post_counts(t) == 0) continue;
    q += series.observations.row(t).transpose();
    ++nonempty;
  }
  if (nonempty == 0) throw Error("cross_entropy_series: forum " + series.forum_id + " has no posts");
  q /= nonempty;
  q = q.cwiseMax(epsilon);
  q /= q.sum();
  for (Eigen::Index t = 0; t < series.length(); ++t) {
    if (series.post_counts(t) == 0) continue;
    out.weeks.push_back(series.weeks.start_week + t);
    out.values.push_back(cross_entropy_bits(series.observations.row(t).transpose(), q));
  }
  out.reference = std::move(q);
  return out;
}

namespace {

// Ranks descending by value; ties and missing values ordered by forum id.
std::vector<int> rank_descending(const std::vector<std::optional<double>>& values,
                                 const std::vector<std::string>& ids) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a].has_value() != values[b].has_value()) return values[a].has_value();
    if (values[a] && *values[a] != *values[b]) return *values[a] > *values[b];
    return ids[a] < ids[b];
  });
  std::vector<int> rank(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r) + 1;
  return rank;
}

}  // namespace

VolatilityReport volatility_report(const BphmmModel& model, const std::vector<ForumSeries>& series,
                                   double epsilon) {
  std::vector<std::optional<double>> hmm, ce;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < series.size(); ++i) {
    ids.push_back(series[i].forum_id);
    hmm.push_back(volatility_hmm(model, static_cast<int>(i)));
    const auto h = cross_entropy_series(series[i], epsilon);
    ce.push_back(std::accumulate(h.values.begin(), h.values.end(), 0.0) /
                 static_cast<double>(h.values.size()));
  }
  const auto hr = rank_descending(hmm, ids);
  const auto cr = rank_descending(ce, ids);
  VolatilityReport rep;
  for (std::size_t i = 0; i < series.size(); ++i)
    rep.entries.push_back({ids[i], hmm[i], ce[i], hr[i], cr[i]});
  return rep;
}

std::vector<RareState> rare_states(const BphmmModel& model, const std::vector<ForumSeries>& series,
                                   double threshold) {
  if (series.size() != model.sequences.size())
    throw Error("rare_states: series do not match the fitted model");
  std::vector<RareState> per_state(static_cast<std::size_t>(model.state_count()));
  long nonempty = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& seq = model.sequences[i].states;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      if (series[i].post_counts(static_cast<Eigen::Index>(t)) == 0) continue;
      ++nonempty;
      per_state[static_cast<std::size_t>(seq[t])].occurrences.push_back(
          {series[i].forum_id, series[i].weeks.start_week + static_cast<std::int64_t>(t)});
    }
  }
  std::vector<RareState> out;
  if (nonempty == 0) return out;
  for (std::size_t k = 0; k < per_state.size(); ++k) {
    auto& rs = per_state[k];
    if (model.empty_state && static_cast<int>(k) == *model.empty_state) continue;
    if (rs.occurrences.empty()) continue;
    rs.state = static_cast<int>(k);
    rs.occupancy = static_cast<double>(rs.occurrences.size()) / static_cast<double>(nonempty);
    if (rs.occupancy < threshold) out.push_back(std::move(rs));
  }
  return out;
}

std::vector<int> change_points(std::span<const int> states, std::optional<int> excluded) {
  std::vector<int> out;
  for (std::size_t t = 1; t < states.size(); ++t) {
    if (states[t] == states[t - 1]) continue;
    if (excluded && (states[t] == *excluded || states[t - 1] == *excluded)) continue;
    out.push_back(static_cast<int>(t));
  }
  return out;
}

std::vector<TransitionEvent> transition_events(const BphmmModel& model,
                                               const std::vector<ForumSeries>& series) {
  if (series.size() != model.sequences.size())
    throw Error("transition_events: series do not match the fitted model");
  std::vector<TransitionEvent> out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& seq = model.sequences[i].states;
    const auto vol = volatility_hmm(model, static_cast<int>(i));
    for (int t : change_points(seq, model.empty_state))
      out.push_back({series[i].forum_id, series[i].weeks.start_week + t, t,
                     seq[static_cast<std::size_t>(t) - 1], seq[static_cast<std::size_t>(t)], vol});
  }
  std::stable_sort(out.begin(), out.end(), [](const TransitionEvent& a, const TransitionEvent& b) {
    if (a.volatility.has_value() != b.volatility.has_value()) return a.volatility.has_value();
    if (a.volatility && *a.volatility != *b.volatility) return *a.volatility < *b.volatility;
    if (a.forum_id != b.forum_id) return a.forum_id < b.forum_id;
    return a.week < b.week;
  });
  return out;
}

std::vector<ActivityPeak> activity_peaks(const ForumSeries& series, double z_threshold) {
  std::vector<ActivityPeak> out;
  const Eigen::Index w = series.post_counts.size();
  if (w < 8) return out;
  const Eigen::ArrayXd counts = series.post_counts.cast<double>().array();
  const double mean = counts.mean();
  const double sd = std::sqrt((counts - mean).square().mean());
  for (Eigen::Index t = 0; t < w; ++t) {
    if (counts(t) > mean + z_threshold * sd)
      out.push_back({series.forum_id, series.weeks.start_week + t, static_cast<int>(t),
                     sd > 0.0 ? (counts(t) - mean) / sd : 0.0});
  }
  return out;
}

AnomalyReport anomaly_report(const BphmmModel& model, const std::vector<ForumSeries>& series,
                             double rare_threshold, double z_threshold) {
  AnomalyReport rep;
  rep.rare = rare_states(model, series, rare_threshold);
  rep.events = transition_events(model, series);
  for (const auto& s : series) {
    auto peaks = activity_peaks(s, z_threshold);
    rep.peaks.insert(rep.peaks.end(), peaks.begin(), peaks.end());
  }
  return rep;
}

}  // namespace forumdyn
