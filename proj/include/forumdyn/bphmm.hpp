// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "forumdyn/common.hpp"
#include "forumdyn/emission.hpp"
#include "forumdyn/timeseries.hpp"

namespace forumdyn {

struct McmcConfig {
  int sweeps = 1000;
  int burn_in = 500;
  std::uint64_t seed = 0;
  double alpha = 2.0;                     // IBP mass
  CovarianceKind covariance = CovarianceKind::Diagonal;
  double kappa0 = 1.0;
  double a0 = 2.0;
  double variance_floor = 1e-6;
  double transition_concentration = 1.0;  // symmetric Dirichlet on rows of T_i
  double init_concentration = 1.0;        // symmetric Dirichlet on pi_i
  int birth_window = 10;                  // longest data window seeding a birth proposal

  void validate() const;
};

/// Per-series Markov chain over that series' active states. `states` holds
/// the global ids (ascending) that index the rows and columns of `trans`.
struct TransitionModel {
  std::vector<int> states;
  VectorXd init;
  MatrixXd trans;

  int local_index(int global_state) const;  // -1 when inactive
};

struct StateSequence {
  std::string forum_id;
  std::vector<int> states;  // global ids, one per week
};

struct BphmmModel {
  std::vector<std::string> forum_ids;
  MatrixXi features;                 // N x K+, F(i, k) = 1 when series i exhibits state k
  std::vector<GlobalState> states;
  std::vector<TransitionModel> transitions;
  std::vector<StateSequence> sequences;
  double log_posterior = 0.0;
  int map_sweep = 0;
  std::optional<int> empty_state;    // state decoding the zero-post weeks
  McmcConfig config;

  int state_count() const { return static_cast<int>(states.size()); }
  int series_count() const { return static_cast<int>(features.rows()); }
};

/// Snapshot of one chain position.
struct BphmmSample {
  MatrixXi features;
  std::vector<GlobalState> states;
  std::vector<TransitionModel> transitions;
  std::vector<std::vector<int>> assignments;  // global ids
  double log_posterior = 0.0;
};

/// One MCMC chain for the Beta-Process HMM. Each sweep runs, in order:
/// Gibbs updates of shared features, birth/death moves on series-unique
/// features, pruning of unused states, blocked forward-filter backward-sample
/// of every state sequence, conjugate emission updates, and Dirichlet updates
/// of the transition weights.
class BphmmSampler {
 public:
  BphmmSampler(const std::vector<ForumSeries>& series, const McmcConfig& cfg);

  void sweep();
  int sweeps_done() const { return sweeps_; }
  BphmmSample sample() const;
  double log_posterior() const;
  int state_count() const { return static_cast<int>(states_.size()); }

 private:
  std::vector<int> active(std::size_t i) const;
  double marginal(std::size_t i, const std::vector<int>& act) const;
  void transition_probs(std::size_t i, const std::vector<int>& act, VectorXd& init,
                        MatrixXd& trans) const;
  int add_state(const GlobalState& st);
  void remove_state(int k);
  void refresh_loglik(int k);
  void update_shared_features();
  void birth_death(std::size_t i);
  void prune_states();
  void resample_sequences();
  void resample_emissions();
  void resample_transitions();
  VectorXd birth_start_weights(std::size_t i, const std::vector<int>& act) const;
  double birth_log_density(std::size_t i, const VectorXd& start_weights, const GlobalState& st) const;
  GlobalState propose_birth(std::size_t i, const VectorXd& start_weights);
  double unique_count(std::size_t i) const;

  std::vector<MatrixXd> data_;
  McmcConfig cfg_;
  GaussianFamily family_;
  Rng rng_;
  std::vector<GlobalState> states_;
  std::vector<std::vector<char>> features_;  // N x K+
  std::vector<MatrixXd> eta_;                // per series, K+ x K+ transition weights
  std::vector<VectorXd> eta0_;               // per series, K+ initial weights
  std::vector<std::vector<int>> z_;          // global ids
  std::vector<MatrixXd> loglik_;             // per series, W x K+
  int sweeps_ = 0;
};

using BphmmTraceFn = std::function<void(int sweep, const BphmmSampler&)>;

/// Runs cfg.sweeps sweeps and returns the post-burn-in sample with the
/// highest joint log posterior, after Viterbi decoding. States a series never
/// visits on its decoded path are dropped from that series (repeated until
/// stable) and state ids are relabeled in order of first appearance.
BphmmModel fit_bphmm(const std::vector<ForumSeries>& series, const McmcConfig& cfg,
                     const BphmmTraceFn& trace = {});

/// Viterbi path of one series under its fitted chain and the shared
/// emissions. Ties go to the lower state id.
StateSequence decode(const BphmmModel& model, int series_index, const MatrixXd& observations);

/// W x S log emission matrix of `observations` under the given global states.
MatrixXd emission_log_likelihoods(const std::vector<GlobalState>& states,
                                  const std::vector<int>& state_ids, const MatrixXd& observations);

}  // namespace forumdyn
