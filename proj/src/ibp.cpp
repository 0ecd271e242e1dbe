// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/ibp.hpp"

#include <cmath>
#include <map>
#include <vector>

namespace forumdyn {

MatrixXi sample_ibp(int customers, double alpha, Rng& rng) {
  if (customers < 1) throw Error("sample_ibp: need at least one customer");
  if (alpha < 0.0) throw Error("sample_ibp: alpha must be non-negative");
  std::vector<std::vector<int>> cols;  // column-major dish histories
  std::vector<int> popularity;
  for (int n = 1; n <= customers; ++n) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      std::bernoulli_distribution take(static_cast<double>(popularity[k]) / n);
      const int f = take(rng) ? 1 : 0;
      cols[k].push_back(f);
      popularity[k] += f;
    }
    int fresh = 0;
    if (alpha > 0.0) fresh = std::poisson_distribution<int>(alpha / n)(rng);
    for (int j = 0; j < fresh; ++j) {
      std::vector<int> col(static_cast<std::size_t>(n - 1), 0);
      col.push_back(1);
      cols.push_back(std::move(col));
      popularity.push_back(1);
    }
  }
  MatrixXi f(customers, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (int n = 0; n < customers; ++n) f(n, static_cast<Eigen::Index>(k)) = cols[k][n];
  return f;
}

MatrixXi sample_ibp(int customers, double alpha, std::uint64_t seed) {
  Rng rng(seed);
  return sample_ibp(customers, alpha, rng);
}

MatrixXi sample_beta_bernoulli(int rows, int features, double alpha, Rng& rng) {
  if (rows < 1 || features < 1) throw Error("sample_beta_bernoulli: empty shape");
  if (!(alpha > 0.0)) throw Error("sample_beta_bernoulli: alpha must be positive");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double a = alpha / features;
  MatrixXi f(rows, features);
  for (int k = 0; k < features; ++k) {
    // Beta(a, 1) by inversion: U^(1/a).
    const double theta = std::pow(unif(rng), 1.0 / a);
    for (int n = 0; n < rows; ++n) f(n, k) = unif(rng) < theta ? 1 : 0;
  }
  return f;
}

double ibp_log_pmf(const MatrixXi& features, double alpha) {
  const auto n = features.rows();
  double harmonic = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i) harmonic += 1.0 / static_cast<double>(i);
  std::map<std::vector<int>, int> histories;
  double r = -alpha * harmonic;
  for (Eigen::Index k = 0; k < features.cols(); ++k) {
    const int m = features.col(k).sum();
    if (m == 0) continue;
    std::vector<int> h(features.col(k).data(), features.col(k).data() + n);
    ++histories[h];
    r += std::log(alpha) + std::lgamma(static_cast<double>(n - m + 1)) +
         std::lgamma(static_cast<double>(m)) - std::lgamma(static_cast<double>(n + 1));
  }
  for (const auto& [h, count] : histories) r -= std::lgamma(count + 1.0);
  return r;
}

}  // namespace forumdyn
