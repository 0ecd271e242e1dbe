// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/emission.hpp"

#include <cmath>
#include <numbers>

namespace forumdyn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_multigamma(double x, Eigen::Index d) {
  double r = 0.25 * static_cast<double>(d * (d - 1)) * std::log(std::numbers::pi);
  for (Eigen::Index j = 0; j < d; ++j) r += std::lgamma(x - 0.5 * static_cast<double>(j));
  return r;
}

MatrixXd project_spd(const MatrixXd& m, double floor) {
  MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  VectorXd ev = es.eigenvalues().cwiseMax(floor);
  MatrixXd out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

std::string to_string(CovarianceKind kind) {
  return kind == CovarianceKind::Full ? "full" : "diagonal";
}

CovarianceKind covariance_kind_from_string(const std::string& s) {
  if (s == "diagonal" || s == "diag") return CovarianceKind::Diagonal;
  if (s == "full") return CovarianceKind::Full;
  throw Error("unknown covariance kind: " + s);
}

SufficientStats::SufficientStats(Eigen::Index dim, bool full)
    : sum(VectorXd::Zero(dim)), sum_sq(VectorXd::Zero(dim)) {
  if (full) outer = MatrixXd::Zero(dim, dim);
}

EmissionPrior pooled_prior(const MatrixXd& data, CovarianceKind kind, double kappa0, double a0,
                           double variance_floor) {
  if (data.rows() == 0) throw Error("pooled_prior: no observations");
  EmissionPrior p;
  p.kind = kind;
  p.kappa0 = kappa0;
  p.a0 = a0;
  p.variance_floor = variance_floor;
  p.mean0 = data.colwise().mean().transpose();
  VectorXd var = (data.rowwise() - p.mean0.transpose()).array().square().colwise().mean().transpose();
  var = var.cwiseMax(variance_floor);
  p.b0 = var;
  const auto d = static_cast<double>(data.cols());
  p.nu0 = d + 2.0;
  p.psi0 = var.asDiagonal() * (p.nu0 - d - 1.0);
  return p;
}

GaussianFamily::GaussianFamily(EmissionPrior prior) : prior_(std::move(prior)) {
  if (!(prior_.kappa0 > 0.0)) throw Error("emission prior: kappa0 must be positive");
  if (!full() && !(prior_.a0 > 0.0)) throw Error("emission prior: a0 must be positive");
  if (full() && !(prior_.nu0 > static_cast<double>(prior_.dim()) - 1.0))
    throw Error("emission prior: nu0 must exceed D - 1");
}

GaussianFamily::Posterior GaussianFamily::posterior(const SufficientStats& s) const {
  Posterior p;
  const double n = s.n;
  p.kappa = prior_.kappa0 + n;
  p.mean = (prior_.kappa0 * prior_.mean0 + s.sum) / p.kappa;
  if (n > 0.0) {
    const VectorXd mean = s.sum / n;
    const VectorXd diff = mean - prior_.mean0;
    const double shrink = prior_.kappa0 * n / p.kappa;
    if (full()) {
      MatrixXd scatter = s.outer - n * mean * mean.transpose();
      p.nu = prior_.nu0 + n;
      p.psi = prior_.psi0 + scatter + shrink * diff * diff.transpose();
    } else {
      VectorXd scatter = (s.sum_sq - n * mean.cwiseAbs2()).cwiseMax(0.0);
      p.a = prior_.a0 + 0.5 * n;
      p.b = prior_.b0 + 0.5 * scatter + 0.5 * shrink * diff.cwiseAbs2();
    }
  } else {
    p.a = prior_.a0;
    p.b = prior_.b0;
    p.nu = prior_.nu0;
    p.psi = prior_.psi0;
  }
  return p;
}

GlobalState GaussianFamily::sample_posterior(const SufficientStats& stats, Rng& rng) const {
  const Posterior p = posterior(stats);
  const Eigen::Index d = prior_.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  GlobalState st;
  if (!full()) {
    std::gamma_distribution<double> gamma(p.a, 1.0);
    st.var.resize(d);
    st.mean.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      // 1/sigma^2 ~ Gamma(a, rate b)
      const double precision = gamma(rng) / p.b(j);
      st.var(j) = 1.0 / precision;
      st.mean(j) = p.mean(j) + std::sqrt(st.var(j) / p.kappa) * normal(rng);
    }
    return st;
  }
  // Bartlett decomposition: W ~ Wishart(nu, psi^-1), Sigma = W^-1.
  const MatrixXd psi_inv = p.psi.inverse();
  const MatrixXd chol = Eigen::LLT<MatrixXd>(0.5 * (psi_inv + psi_inv.transpose())).matrixL();
  MatrixXd a = MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    std::chi_squared_distribution<double> chi(p.nu - static_cast<double>(i));
    a(i, i) = std::sqrt(chi(rng));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = normal(rng);
  }
  const MatrixXd la = chol * a;
  const MatrixXd wishart = la * la.transpose();
  st.cov = wishart.inverse();
  st.cov = 0.5 * (st.cov + st.cov.transpose());
  st.var = st.cov.diagonal();
  VectorXd eps(d);
  for (Eigen::Index j = 0; j < d; ++j) eps(j) = normal(rng);
  const MatrixXd lc = Eigen::LLT<MatrixXd>(st.cov / p.kappa).matrixL();
  st.mean = p.mean + lc * eps;
  return st;
}

GlobalState GaussianFamily::floored(const GlobalState& state) const {
  GlobalState out = state;
  if (out.cov.size() == 0) {
    out.var = out.var.cwiseMax(prior_.variance_floor);
  } else {
    out.cov = project_spd(out.cov, prior_.variance_floor);
    out.var = out.cov.diagonal();
  }
  return out;
}

double GaussianFamily::log_density(const GlobalState& st, const SufficientStats& stats) const {
  const Posterior p = posterior(stats);
  const Eigen::Index d = prior_.dim();
  if (!full()) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double v = st.var(j);
      r += p.a * std::log(p.b(j)) - std::lgamma(p.a) - (p.a + 1.0) * std::log(v) - p.b(j) / v;
      const double mv = v / p.kappa;
      const double dm = st.mean(j) - p.mean(j);
      r += -0.5 * (kLog2Pi + std::log(mv)) - 0.5 * dm * dm / mv;
    }
    return r;
  }
  const Eigen::LLT<MatrixXd> cov_llt(st.cov);
  const Eigen::LLT<MatrixXd> psi_llt(p.psi);
  const double logdet_cov = 2.0 * cov_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double logdet_psi = 2.0 * psi_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double dd = static_cast<double>(d);
  const double trace = (p.psi * cov_llt.solve(MatrixXd::Identity(d, d))).trace();
  double r = 0.5 * p.nu * logdet_psi - 0.5 * p.nu * dd * std::numbers::ln2 - log_multigamma(0.5 * p.nu, d) -
             0.5 * (p.nu + dd + 1.0) * logdet_cov - 0.5 * trace;
  const VectorXd dm = st.mean - p.mean;
  const double maha = p.kappa * dm.dot(cov_llt.solve(dm));
  r += -0.5 * (dd * kLog2Pi + logdet_cov - dd * std::log(p.kappa)) - 0.5 * maha;
  return r;
}

void gaussian_log_likelihood(const GlobalState& st, const MatrixXd& data,
                             Eigen::Ref<VectorXd> out) {
  const auto d = static_cast<double>(data.cols());
  if (st.cov.size() == 0) {
    const double norm = -0.5 * (d * kLog2Pi + st.var.array().log().sum());
    const Eigen::RowVectorXd inv = st.var.cwiseInverse().transpose();
    out = ((data.rowwise() - st.mean.transpose()).array().square().rowwise() * inv.array())
              .rowwise()
              .sum()
              .matrix() * -0.5;
    out.array() += norm;
    return;
  }
  const Eigen::LLT<MatrixXd> llt(st.cov);
  const MatrixXd l = llt.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  const MatrixXd centered = (data.rowwise() - st.mean.transpose()).transpose();
  const MatrixXd solved = l.triangularView<Eigen::Lower>().solve(centered);
  out = solved.colwise().squaredNorm().transpose() * -0.5;
  out.array() += -0.5 * (d * kLog2Pi + logdet);
}

}  // namespace forumdyn
