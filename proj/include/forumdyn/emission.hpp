// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <string>

#include "forumdyn/common.hpp"

namespace forumdyn {

enum class CovarianceKind { Diagonal, Full };

std::string to_string(CovarianceKind kind);
CovarianceKind covariance_kind_from_string(const std::string& s);

/// Gaussian emission parameters of one shared state. `var` holds the
/// diagonal; `cov` is only populated for full covariances.
struct GlobalState {
  VectorXd mean;
  VectorXd var;
  MatrixXd cov;
};

struct SufficientStats {
  double n = 0.0;
  VectorXd sum;
  VectorXd sum_sq;  // per-dimension sum of squares
  MatrixXd outer;   // sum of y y^T (full covariance only)

  explicit SufficientStats(Eigen::Index dim = 0, bool full = false);
  template <typename Derived>
  void add(const Eigen::MatrixBase<Derived>& y) {
    n += 1.0;
    sum += y;
    sum_sq += y.cwiseAbs2();
    if (outer.size()) outer.noalias() += y * y.transpose();
  }
};

struct EmissionPrior {
  CovarianceKind kind = CovarianceKind::Diagonal;
  VectorXd mean0;
  double kappa0 = 1.0;
  double a0 = 2.0;     // inverse-gamma shape (diagonal)
  VectorXd b0;         // inverse-gamma scale per dimension (diagonal)
  double nu0 = 0.0;    // inverse-Wishart degrees of freedom (full)
  MatrixXd psi0;       // inverse-Wishart scale (full)
  double variance_floor = 1e-6;

  Eigen::Index dim() const { return mean0.size(); }
};

/// Prior centered on the pooled mean of `data` rows with per-dimension scale
/// equal to the pooled variance (floored). For full covariance nu0 = D + 2 and
/// psi0 = diag(pooled variance), so the prior mean of the covariance equals
/// the pooled variance as in the diagonal case when a0 = 2.
EmissionPrior pooled_prior(const MatrixXd& data, CovarianceKind kind, double kappa0, double a0,
                           double variance_floor);

/// Log likelihood of every row of `data` under `state`, written into `out`.
/// A populated `cov` selects the full-covariance density.
void gaussian_log_likelihood(const GlobalState& state, const MatrixXd& data,
                             Eigen::Ref<VectorXd> out);

/// Conjugate Gaussian family used by the segmentation sampler.
class GaussianFamily {
 public:
  explicit GaussianFamily(EmissionPrior prior);

  const EmissionPrior& prior() const { return prior_; }
  bool full() const { return prior_.kind == CovarianceKind::Full; }
  SufficientStats empty_stats() const { return SufficientStats(prior_.dim(), full()); }

  /// Raw draw; the variance floor is not applied, so the draw has exactly
  /// the density reported by log_density.
  GlobalState sample_posterior(const SufficientStats& stats, Rng& rng) const;
  GlobalState sample_prior(Rng& rng) const { return sample_posterior(empty_stats(), rng); }

  /// Log density of the parameters under the posterior given `stats`
  /// (the prior when stats are empty).
  double log_density(const GlobalState& state, const SufficientStats& stats) const;
  double log_prior(const GlobalState& state) const { return log_density(state, empty_stats()); }

  /// The state with variances (or covariance eigenvalues) raised to the floor.
  GlobalState floored(const GlobalState& state) const;

 private:
  struct Posterior {
    VectorXd mean;
    double kappa;
    double a;      // diagonal shape
    VectorXd b;    // diagonal scale
    double nu;     // full dof
    MatrixXd psi;  // full scale
  };
  Posterior posterior(const SufficientStats& stats) const;

  EmissionPrior prior_;
};

}  // namespace forumdyn
