// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>

#include "forumdyn/common.hpp"

namespace forumdyn {

/// One draw of the Indian Buffet Process with mass alpha: customer 1 takes
/// Poisson(alpha) dishes; customer n takes each existing dish k with
/// probability m_k / n and Poisson(alpha / n) new dishes. N x K+ binary matrix.
MatrixXi sample_ibp(int customers, double alpha, Rng& rng);
MatrixXi sample_ibp(int customers, double alpha, std::uint64_t seed);

/// Finite Beta-Bernoulli feature matrix: theta_k ~ Beta(alpha / K, 1),
/// F_nk ~ Bernoulli(theta_k). N x K.
MatrixXi sample_beta_bernoulli(int rows, int features, double alpha, Rng& rng);

/// log P(F) under the IBP with mass alpha (columns are unordered; columns
/// with identical histories are treated as exchangeable).
double ibp_log_pmf(const MatrixXi& features, double alpha);

}  // namespace forumdyn
