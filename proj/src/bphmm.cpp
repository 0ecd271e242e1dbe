// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/bphmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "forumdyn/hmm.hpp"
#include "forumdyn/ibp.hpp"

namespace forumdyn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void erase_row_col(MatrixXd& m, Eigen::Index k) {
  const Eigen::Index n = m.rows();
  MatrixXd out(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == k) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == k) continue;
      out(rr, cc++) = m(r, c);
    }
    ++rr;
  }
  m = std::move(out);
}

void erase_col(MatrixXd& m, Eigen::Index k) {
  const Eigen::Index n = m.cols();
  if (k < n - 1) m.middleCols(k, n - 1 - k) = m.rightCols(n - 1 - k).eval();
  m.conservativeResize(Eigen::NoChange, n - 1);
}

void erase_entry(VectorXd& v, Eigen::Index k) {
  const Eigen::Index n = v.size();
  if (k < n - 1) v.segment(k, n - 1 - k) = v.tail(n - 1 - k).eval();
  v.conservativeResize(n - 1);
}

double log_sum_exp(const std::vector<double>& xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

double dirichlet_log_density(const VectorXd& p, double conc) {
  const auto n = static_cast<double>(p.size());
  double r = std::lgamma(conc * n) - n * std::lgamma(conc);
  if (conc != 1.0) r += (conc - 1.0) * p.array().max(1e-300).log().sum();
  return r;
}

// Normalized weights of `rows` restricted to `act`.
void restrict_normalize(const MatrixXd& eta, const VectorXd& eta0, const std::vector<int>& act,
                        VectorXd& init, MatrixXd& trans) {
  const auto s = static_cast<Eigen::Index>(act.size());
  init.resize(s);
  trans.resize(s, s);
  for (Eigen::Index a = 0; a < s; ++a) {
    init(a) = eta0(act[a]);
    for (Eigen::Index b = 0; b < s; ++b) trans(a, b) = eta(act[a], act[b]);
  }
  init /= init.sum();
  trans.array().colwise() /= trans.rowwise().sum().array();
}

void normalize_rows(VectorXd& init, MatrixXd& trans) {
  const double s = init.sum();
  if (s > 0.0)
    init /= s;
  else
    init.setConstant(1.0 / static_cast<double>(init.size()));
  for (Eigen::Index r = 0; r < trans.rows(); ++r) {
    const double rs = trans.row(r).sum();
    if (rs > 0.0)
      trans.row(r) /= rs;
    else
      trans.row(r).setConstant(1.0 / static_cast<double>(trans.cols()));
  }
}

}  // namespace

void McmcConfig::validate() const {
  if (sweeps < 1) throw Error("bphmm: sweeps must be >= 1");
  if (burn_in < 0) throw Error("bphmm: burn_in must be >= 0");
  if (!(alpha > 0.0)) throw Error("bphmm: alpha must be positive");
  if (!(kappa0 > 0.0) || !(a0 > 0.0)) throw Error("bphmm: emission prior must be proper");
  if (!(variance_floor > 0.0)) throw Error("bphmm: variance floor must be positive");
  if (!(transition_concentration > 0.0) || !(init_concentration > 0.0))
    throw Error("bphmm: Dirichlet concentrations must be positive");
  if (birth_window < 1) throw Error("bphmm: birth_window must be >= 1");
}

int TransitionModel::local_index(int global_state) const {
  auto it = std::lower_bound(states.begin(), states.end(), global_state);
  if (it == states.end() || *it != global_state) return -1;
  return static_cast<int>(it - states.begin());
}

MatrixXd emission_log_likelihoods(const std::vector<GlobalState>& states,
                                  const std::vector<int>& state_ids, const MatrixXd& observations) {
  MatrixXd out(observations.rows(), static_cast<Eigen::Index>(state_ids.size()));
  for (std::size_t a = 0; a < state_ids.size(); ++a)
    gaussian_log_likelihood(states.at(static_cast<std::size_t>(state_ids[a])), observations,
                            out.col(static_cast<Eigen::Index>(a)));
  return out;
}

namespace {

std::vector<MatrixXd> checked_data(const std::vector<ForumSeries>& series) {
  if (series.empty()) throw Error("bphmm: need at least one series");
  std::vector<MatrixXd> data;
  const Eigen::Index dim = series.front().dim();
  for (const auto& s : series) {
    if (s.length() == 0) throw Error("bphmm: zero-length series " + s.forum_id);
    if (s.dim() != dim || dim == 0)
      throw Error("bphmm: observation dimension mismatch in series " + s.forum_id);
    data.push_back(s.observations);
  }
  return data;
}

MatrixXd stack(const std::vector<MatrixXd>& data) {
  Eigen::Index rows = 0;
  for (const auto& d : data) rows += d.rows();
  MatrixXd all(rows, data.front().cols());
  Eigen::Index r = 0;
  for (const auto& d : data) {
    all.middleRows(r, d.rows()) = d;
    r += d.rows();
  }
  return all;
}

}  // namespace

BphmmSampler::BphmmSampler(const std::vector<ForumSeries>& series, const McmcConfig& cfg)
    : data_(checked_data(series)),
      cfg_(cfg),
      family_(pooled_prior(stack(data_), cfg.covariance, cfg.kappa0, cfg.a0, cfg.variance_floor)),
      rng_(cfg.seed) {
  cfg_.validate();
  const std::size_t n = data_.size();
  features_.assign(n, {});
  eta_.assign(n, MatrixXd(0, 0));
  eta0_.assign(n, VectorXd(0));
  loglik_.resize(n);
  z_.resize(n);
  for (std::size_t i = 0; i < n; ++i) loglik_[i].resize(data_[i].rows(), 0);

  // Start from one state fitted to all observations, shared by every series.
  SufficientStats all = family_.empty_stats();
  for (const auto& d : data_)
    for (Eigen::Index t = 0; t < d.rows(); ++t) all.add(d.row(t).transpose());
  const int k = add_state(family_.sample_posterior(all, rng_));
  for (std::size_t i = 0; i < n; ++i) {
    features_[i][static_cast<std::size_t>(k)] = 1;
    z_[i].assign(static_cast<std::size_t>(data_[i].rows()), k);
  }
}

std::vector<int> BphmmSampler::active(std::size_t i) const {
  std::vector<int> act;
  for (std::size_t k = 0; k < features_[i].size(); ++k)
    if (features_[i][k]) act.push_back(static_cast<int>(k));
  return act;
}

void BphmmSampler::transition_probs(std::size_t i, const std::vector<int>& act, VectorXd& init,
                                    MatrixXd& trans) const {
  restrict_normalize(eta_[i], eta0_[i], act, init, trans);
}

double BphmmSampler::marginal(std::size_t i, const std::vector<int>& act) const {
  if (act.empty()) return kNegInf;
  VectorXd init;
  MatrixXd trans;
  transition_probs(i, act, init, trans);
  MatrixXd l(loglik_[i].rows(), static_cast<Eigen::Index>(act.size()));
  for (std::size_t a = 0; a < act.size(); ++a)
    l.col(static_cast<Eigen::Index>(a)) = loglik_[i].col(act[a]);
  return forward_loglik(l, init, trans);
}

int BphmmSampler::add_state(const GlobalState& st) {
  const auto k = static_cast<Eigen::Index>(states_.size());
  states_.push_back(st);
  std::gamma_distribution<double> g(cfg_.transition_concentration, 1.0);
  std::gamma_distribution<double> g0(cfg_.init_concentration, 1.0);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    features_[i].push_back(0);
    eta_[i].conservativeResize(k + 1, k + 1);
    for (Eigen::Index j = 0; j <= k; ++j) eta_[i](k, j) = g(rng_);
    for (Eigen::Index j = 0; j < k; ++j) eta_[i](j, k) = g(rng_);
    eta0_[i].conservativeResize(k + 1);
    eta0_[i](k) = g0(rng_);
    loglik_[i].conservativeResize(Eigen::NoChange, k + 1);
  }
  refresh_loglik(static_cast<int>(k));
  return static_cast<int>(k);
}

void BphmmSampler::remove_state(int k) {
  states_.erase(states_.begin() + k);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    features_[i].erase(features_[i].begin() + k);
    erase_row_col(eta_[i], k);
    erase_entry(eta0_[i], k);
    erase_col(loglik_[i], k);
    for (int& s : z_[i]) {
      if (s == k)
        s = -1;  // stale until the next sequence update
      else if (s > k)
        --s;
    }
  }
}

void BphmmSampler::refresh_loglik(int k) {
  const GlobalState floored = family_.floored(states_[static_cast<std::size_t>(k)]);
  for (std::size_t i = 0; i < data_.size(); ++i)
    gaussian_log_likelihood(floored, data_[i], loglik_[i].col(k));
}

double BphmmSampler::unique_count(std::size_t i) const {
  double n = 0;
  for (std::size_t k = 0; k < states_.size(); ++k) {
    if (!features_[i][k]) continue;
    bool shared = false;
    for (std::size_t j = 0; j < data_.size() && !shared; ++j) shared = j != i && features_[j][k];
    if (!shared) n += 1;
  }
  return n;
}

void BphmmSampler::update_shared_features() {
  const auto n = static_cast<double>(data_.size());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    for (std::size_t k = 0; k < states_.size(); ++k) {
      double m = 0;
      for (std::size_t j = 0; j < data_.size(); ++j)
        if (j != i && features_[j][k]) m += 1;
      if (m == 0) continue;  // series-unique: birth/death territory
      features_[i][k] = 1;
      const auto on = active(i);
      features_[i][k] = 0;
      const auto off = active(i);
      if (off.empty()) {
        features_[i][k] = 1;
        continue;
      }
      const double lp1 = std::log(m / n) + marginal(i, on);
      const double lp0 = std::log((n - m) / n) + marginal(i, off);
      const double p1 = 1.0 / (1.0 + std::exp(lp0 - lp1));
      features_[i][k] = unif(rng_) < p1 ? 1 : 0;
    }
  }
}

VectorXd BphmmSampler::birth_start_weights(std::size_t i, const std::vector<int>& act) const {
  const Eigen::Index w = data_[i].rows();
  VectorXd surprise(w);
  for (Eigen::Index t = 0; t < w; ++t) {
    double best = kNegInf;
    for (int a : act) best = std::max(best, loglik_[i](t, a));
    surprise(t) = -best;
  }
  VectorXd weights = VectorXd::Constant(w, 0.5 / static_cast<double>(w));
  if (surprise.allFinite()) {
    VectorXd g = surprise.array() - surprise.minCoeff();
    const double total = g.sum();
    if (total > 0.0 && std::isfinite(total))
      weights += 0.5 * g / total;
    else
      weights *= 2.0;
  } else {
    weights *= 2.0;
  }
  return weights;
}

// Birth proposals draw a state from the emission posterior given a data window
// [t, t + L) of series i, t ~ start_weights and L ~ Uniform{1..birth_window}.
GlobalState BphmmSampler::propose_birth(std::size_t i, const VectorXd& start_weights) {
  std::discrete_distribution<Eigen::Index> pick_start(start_weights.data(),
                                                      start_weights.data() + start_weights.size());
  std::uniform_int_distribution<int> pick_len(1, cfg_.birth_window);
  const Eigen::Index t = pick_start(rng_);
  const Eigen::Index end = std::min<Eigen::Index>(t + pick_len(rng_), data_[i].rows());
  SufficientStats stats = family_.empty_stats();
  for (Eigen::Index r = t; r < end; ++r) stats.add(data_[i].row(r).transpose());
  return family_.sample_posterior(stats, rng_);
}

double BphmmSampler::birth_log_density(std::size_t i, const VectorXd& start_weights,
                                       const GlobalState& st) const {
  const Eigen::Index w = data_[i].rows();
  const double log_len = std::log(static_cast<double>(cfg_.birth_window));
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(w * cfg_.birth_window));
  for (Eigen::Index t = 0; t < w; ++t) {
    SufficientStats stats = family_.empty_stats();
    const double lw = std::log(start_weights(t)) - log_len;
    for (int len = 1; len <= cfg_.birth_window; ++len) {
      const Eigen::Index r = t + len - 1;
      if (r < w) stats.add(data_[i].row(r).transpose());
      terms.push_back(lw + family_.log_density(st, stats));
    }
  }
  return log_sum_exp(terms);
}

void BphmmSampler::birth_death(std::size_t i) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double rate = cfg_.alpha / static_cast<double>(data_.size());
  const double n_unique = unique_count(i);
  const auto act = active(i);
  if (unif(rng_) < 0.5) {
    const VectorXd weights = birth_start_weights(i, act);
    GlobalState proposal = propose_birth(i, weights);
    const double log_q = birth_log_density(i, weights, proposal);
    const double log_p = family_.log_prior(proposal);
    const double old_marginal = marginal(i, act);
    const int k = add_state(proposal);
    features_[i][static_cast<std::size_t>(k)] = 1;
    const double new_marginal = marginal(i, active(i));
    const double log_accept =
        new_marginal - old_marginal + std::log(rate) - std::log(n_unique + 1.0) + log_p - log_q;
    if (!(std::log(unif(rng_)) < log_accept)) remove_state(k);
    return;
  }
  if (n_unique == 0 || act.size() < 2) return;
  std::vector<int> unique;
  for (int k : act) {
    bool shared = false;
    for (std::size_t j = 0; j < data_.size() && !shared; ++j)
      shared = j != i && features_[j][static_cast<std::size_t>(k)];
    if (!shared) unique.push_back(k);
  }
  std::uniform_int_distribution<std::size_t> pick(0, unique.size() - 1);
  const int k = unique[pick(rng_)];
  std::vector<int> reduced;
  std::copy_if(act.begin(), act.end(), std::back_inserter(reduced), [k](int s) { return s != k; });
  const double old_marginal = marginal(i, act);
  const double new_marginal = marginal(i, reduced);
  const VectorXd weights = birth_start_weights(i, reduced);
  const auto& st = states_[static_cast<std::size_t>(k)];
  const double log_q = birth_log_density(i, weights, st);
  const double log_p = family_.log_prior(st);
  const double log_accept =
      new_marginal - old_marginal - std::log(rate) + std::log(n_unique) - log_p + log_q;
  if (std::log(unif(rng_)) < log_accept) features_[i][static_cast<std::size_t>(k)] = 0;
}

void BphmmSampler::prune_states() {
  for (int k = static_cast<int>(states_.size()) - 1; k >= 0; --k) {
    bool used = false;
    for (std::size_t i = 0; i < data_.size() && !used; ++i) used = features_[i][static_cast<std::size_t>(k)];
    if (!used) remove_state(k);
  }
}

void BphmmSampler::resample_sequences() {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const auto act = active(i);
    VectorXd init;
    MatrixXd trans;
    transition_probs(i, act, init, trans);
    MatrixXd l(loglik_[i].rows(), static_cast<Eigen::Index>(act.size()));
    for (std::size_t a = 0; a < act.size(); ++a)
      l.col(static_cast<Eigen::Index>(a)) = loglik_[i].col(act[a]);
    const auto local = ffbs(l, init, trans, rng_);
    for (std::size_t t = 0; t < local.size(); ++t) z_[i][t] = act[static_cast<std::size_t>(local[t])];
  }
}

void BphmmSampler::resample_emissions() {
  std::vector<SufficientStats> stats(states_.size(), family_.empty_stats());
  for (std::size_t i = 0; i < data_.size(); ++i)
    for (std::size_t t = 0; t < z_[i].size(); ++t)
      stats[static_cast<std::size_t>(z_[i][t])].add(data_[i].row(static_cast<Eigen::Index>(t)).transpose());
  for (std::size_t k = 0; k < states_.size(); ++k) {
    states_[k] = family_.sample_posterior(stats[k], rng_);
    refresh_loglik(static_cast<int>(k));
  }
}

// Row weights over the active set are Dirichlet(gamma + counts) times an
// independent Gamma(|A| gamma) scale; weights outside the active block keep
// their Gamma(gamma, 1) prior.
void BphmmSampler::resample_transitions() {
  const double gamma = cfg_.transition_concentration;
  const double gamma0 = cfg_.init_concentration;
  const auto k_total = static_cast<Eigen::Index>(states_.size());
  std::gamma_distribution<double> prior(gamma, 1.0);
  std::gamma_distribution<double> prior0(gamma0, 1.0);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const auto act = active(i);
    std::vector<char> is_active(states_.size(), 0);
    for (int a : act) is_active[static_cast<std::size_t>(a)] = 1;
    MatrixXd counts = MatrixXd::Zero(k_total, k_total);
    for (std::size_t t = 1; t < z_[i].size(); ++t) counts(z_[i][t - 1], z_[i][t]) += 1.0;
    for (Eigen::Index r = 0; r < k_total; ++r) {
      for (Eigen::Index c = 0; c < k_total; ++c)
        if (!is_active[r] || !is_active[c]) eta_[i](r, c) = prior(rng_);
      if (!is_active[r]) continue;
      double total = 0.0;
      for (int c : act) {
        std::gamma_distribution<double> g(gamma + counts(r, c), 1.0);
        total += (eta_[i](r, c) = g(rng_));
      }
      std::gamma_distribution<double> scale(gamma * static_cast<double>(act.size()), 1.0);
      const double s = scale(rng_) / total;
      for (int c : act) eta_[i](r, c) *= s;
    }
    double total = 0.0;
    for (Eigen::Index c = 0; c < k_total; ++c) {
      if (!is_active[c]) {
        eta0_[i](c) = prior0(rng_);
        continue;
      }
      std::gamma_distribution<double> g(gamma0 + (z_[i].front() == c ? 1.0 : 0.0), 1.0);
      total += (eta0_[i](c) = g(rng_));
    }
    std::gamma_distribution<double> scale0(gamma0 * static_cast<double>(act.size()), 1.0);
    const double s0 = scale0(rng_) / total;
    for (int c : act) eta0_[i](c) *= s0;
  }
}

void BphmmSampler::sweep() {
  update_shared_features();
  for (std::size_t i = 0; i < data_.size(); ++i) birth_death(i);
  prune_states();
  resample_sequences();
  resample_emissions();
  resample_transitions();
  ++sweeps_;
}

BphmmSample BphmmSampler::sample() const {
  BphmmSample s;
  s.features = MatrixXi::Zero(static_cast<Eigen::Index>(data_.size()), static_cast<Eigen::Index>(states_.size()));
  for (std::size_t i = 0; i < data_.size(); ++i)
    for (std::size_t k = 0; k < states_.size(); ++k)
      s.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = features_[i][k];
  for (const auto& st : states_) s.states.push_back(family_.floored(st));
  for (std::size_t i = 0; i < data_.size(); ++i) {
    TransitionModel tm;
    tm.states = active(i);
    transition_probs(i, tm.states, tm.init, tm.trans);
    s.transitions.push_back(std::move(tm));
  }
  s.assignments = z_;
  s.log_posterior = log_posterior();
  return s;
}

double BphmmSampler::log_posterior() const {
  MatrixXi f(static_cast<Eigen::Index>(data_.size()), static_cast<Eigen::Index>(states_.size()));
  for (std::size_t i = 0; i < data_.size(); ++i)
    for (std::size_t k = 0; k < states_.size(); ++k)
      f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = features_[i][k];
  double lp = ibp_log_pmf(f, cfg_.alpha);
  for (const auto& st : states_) lp += family_.log_prior(st);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const auto act = active(i);
    VectorXd init;
    MatrixXd trans;
    transition_probs(i, act, init, trans);
    lp += dirichlet_log_density(init, cfg_.init_concentration);
    for (Eigen::Index r = 0; r < trans.rows(); ++r)
      lp += dirichlet_log_density(trans.row(r).transpose(), cfg_.transition_concentration);
    std::vector<int> local(z_[i].size());
    for (std::size_t t = 0; t < z_[i].size(); ++t) {
      auto it = std::find(act.begin(), act.end(), z_[i][t]);
      if (it == act.end()) return kNegInf;
      local[t] = static_cast<int>(it - act.begin());
      lp += loglik_[i](static_cast<Eigen::Index>(t), z_[i][t]);
    }
    lp += std::log(init(local[0]));
    for (std::size_t t = 1; t < local.size(); ++t) lp += std::log(trans(local[t - 1], local[t]));
  }
  return lp;
}

StateSequence decode(const BphmmModel& model, int series_index, const MatrixXd& observations) {
  if (series_index < 0 || series_index >= static_cast<int>(model.transitions.size()))
    throw Error("decode: series index " + std::to_string(series_index) + " out of range");
  const auto& tm = model.transitions[static_cast<std::size_t>(series_index)];
  const MatrixXd l = emission_log_likelihoods(model.states, tm.states, observations);
  const auto local = viterbi(l, tm.init, tm.trans);
  StateSequence seq;
  if (static_cast<std::size_t>(series_index) < model.forum_ids.size())
    seq.forum_id = model.forum_ids[static_cast<std::size_t>(series_index)];
  seq.states.reserve(local.size());
  for (int s : local) seq.states.push_back(tm.states[static_cast<std::size_t>(s)]);
  return seq;
}

namespace {

// Drops states a series never visits on its Viterbi path, re-decoding until
// every active state is used, then removes unused global states and relabels
// ids by first appearance.
void compact(BphmmModel& m, const std::vector<ForumSeries>& series) {
  const auto n = series.size();
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      auto& tm = m.transitions[i];
      m.sequences[i] = decode(m, static_cast<int>(i), series[i].observations);
      std::vector<int> used = m.sequences[i].states;
      std::sort(used.begin(), used.end());
      used.erase(std::unique(used.begin(), used.end()), used.end());
      if (used.size() == tm.states.size()) continue;
      changed = true;
      TransitionModel next;
      next.states = used;
      const auto s = static_cast<Eigen::Index>(used.size());
      next.init.resize(s);
      next.trans.resize(s, s);
      for (Eigen::Index a = 0; a < s; ++a) {
        const int la = tm.local_index(used[a]);
        next.init(a) = tm.init(la);
        for (Eigen::Index b = 0; b < s; ++b) next.trans(a, b) = tm.trans(la, tm.local_index(used[b]));
      }
      normalize_rows(next.init, next.trans);
      tm = std::move(next);
    }
  }

  std::map<int, int> relabel;
  for (const auto& seq : m.sequences)
    for (int s : seq.states)
      if (!relabel.contains(s)) relabel.emplace(s, static_cast<int>(relabel.size()));

  std::vector<GlobalState> states(relabel.size());
  for (const auto& [old_id, new_id] : relabel) states[static_cast<std::size_t>(new_id)] = m.states[static_cast<std::size_t>(old_id)];
  m.states = std::move(states);
  m.features = MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m.states.size()));
  for (std::size_t i = 0; i < n; ++i) {
    auto& tm = m.transitions[i];
    std::vector<std::pair<int, int>> order;  // (new id, old local index)
    for (std::size_t a = 0; a < tm.states.size(); ++a)
      order.emplace_back(relabel.at(tm.states[a]), static_cast<int>(a));
    std::sort(order.begin(), order.end());
    TransitionModel next;
    const auto s = static_cast<Eigen::Index>(order.size());
    next.init.resize(s);
    next.trans.resize(s, s);
    for (Eigen::Index a = 0; a < s; ++a) {
      next.states.push_back(order[a].first);
      next.init(a) = tm.init(order[a].second);
      for (Eigen::Index b = 0; b < s; ++b) next.trans(a, b) = tm.trans(order[a].second, order[b].second);
      m.features(static_cast<Eigen::Index>(i), order[a].first) = 1;
    }
    tm = std::move(next);
    for (int& st : m.sequences[i].states) st = relabel.at(st);
  }
}

std::optional<int> find_empty_state(const BphmmModel& m, const std::vector<ForumSeries>& series) {
  std::vector<long> empty_hits(m.states.size(), 0), other_hits(m.states.size(), 0);
  for (std::size_t i = 0; i < series.size(); ++i)
    for (std::size_t t = 0; t < m.sequences[i].states.size(); ++t) {
      auto s = static_cast<std::size_t>(m.sequences[i].states[t]);
      (series[i].post_counts(static_cast<Eigen::Index>(t)) == 0 ? empty_hits : other_hits)[s] += 1;
    }
  std::optional<int> best;
  for (std::size_t k = 0; k < m.states.size(); ++k) {
    if (empty_hits[k] == 0 || empty_hits[k] <= other_hits[k]) continue;
    if (!best || empty_hits[k] > empty_hits[static_cast<std::size_t>(*best)]) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace

BphmmModel fit_bphmm(const std::vector<ForumSeries>& series, const McmcConfig& cfg,
                     const BphmmTraceFn& trace) {
  BphmmSampler sampler(series, cfg);
  std::optional<BphmmSample> best;
  int best_sweep = 0;
  for (int s = 1; s <= cfg.sweeps; ++s) {
    sampler.sweep();
    if (trace) trace(s, sampler);
    if (s <= cfg.burn_in && s != cfg.sweeps) continue;
    const double lp = sampler.log_posterior();
    if (!best || lp > best->log_posterior) {
      best = sampler.sample();
      best_sweep = s;
    }
  }

  BphmmModel m;
  for (const auto& s : series) m.forum_ids.push_back(s.forum_id);
  m.states = best->states;
  m.transitions = best->transitions;
  m.log_posterior = best->log_posterior;
  m.map_sweep = best_sweep;
  m.config = cfg;
  m.sequences.resize(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) m.sequences[i].forum_id = series[i].forum_id;
  compact(m, series);
  m.empty_state = find_empty_state(m, series);
  return m;
}

}  // namespace forumdyn
