#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "icb/domain.hpp"
#include "icb/estimator.hpp"
#include "icb/stats.hpp"

namespace icb {

/// Empirical plug-in for the asymptotic variance kernel:
/// G_hat = sigma^2 * gram / n_bar. The per-unit Gram average converges to
/// G / sigma^2, which is all the coverage protocol needs.
inline Matrix g_matrix_estimate(const EstimatorState& state, double sigma) {
  if (state.n_bar() == 0) {
    throw std::invalid_argument("g_matrix_estimate: empty state");
  }
  return sigma * sigma * state.gram() / static_cast<double>(state.n_bar());
}

/// Estimated Var(beta_hat) = sigma^4 G_hat^-1 / n_bar, which collapses
/// algebraically to sigma^2 * gram^-1; both forms are asserted equal in
/// tests so the UCB blocks and the asymptotic variance share this path.
inline Matrix beta_covariance(const EstimatorState& state, double sigma) {
  if (!state.ready()) {
    throw EstimatorNotReady("beta_covariance: singular gram");
  }
  Eigen::LDLT<Matrix> ldlt(state.gram());
  Matrix inv = ldlt.solve(Matrix::Identity(state.gram().rows(),
                                           state.gram().cols()));
  return sigma * sigma * 0.5 * (inv + inv.transpose().eval());
}

struct RegionTestResult {
  double stat = 0.0;
  bool covered = false;
};

/// Chi-square confidence-region test for the stacked coefficients:
/// stat = (n_bar / sigma^4) (beta_hat - beta)' G_hat (beta_hat - beta),
/// covered iff stat <= upper-alpha chi-square quantile at 2d degrees of
/// freedom.
inline RegionTestResult beta_region_test(const Vector& beta_hat,
                                         const Vector& beta_true,
                                         const Matrix& g_hat, double sigma,
                                         long n_bar, double alpha_level) {
  if (beta_hat.size() != beta_true.size() ||
      g_hat.rows() != beta_hat.size() || g_hat.cols() != beta_hat.size()) {
    throw std::invalid_argument("beta_region_test: dimension mismatch");
  }
  if (alpha_level <= 0.0 || alpha_level > 1.0) {
    throw std::invalid_argument("beta_region_test: alpha_level out of (0,1]");
  }
  const double lam_min = min_eigenvalue(g_hat);
  const double tr = g_hat.trace();
  if (!(lam_min > 1e-12 * std::max(1.0, tr))) {
    throw EstimatorNotReady("beta_region_test: G_hat not invertible");
  }
  const Vector delta = beta_hat - beta_true;
  RegionTestResult res;
  res.stat = static_cast<double>(n_bar) / std::pow(sigma, 4) *
             delta.dot(g_hat * delta);
  if (alpha_level == 1.0) {
    res.covered = false;  // degenerate region
    return res;
  }
  const int df = static_cast<int>(beta_hat.size());
  res.covered =
      res.stat <= stats::chi_square_quantile(1.0 - alpha_level, df);
  return res;
}

struct InferenceReport {
  Matrix g_hat;
  double chi2_stat = 0.0;
  int df = 0;
  bool covered = false;
  double sigma_used = 0.0;
};

inline InferenceReport inference_report(const EstimatorState& state,
                                        const BetaVector& beta_true,
                                        double sigma, double alpha_level) {
  InferenceReport rep;
  rep.sigma_used = sigma;
  rep.g_hat = g_matrix_estimate(state, sigma);
  rep.df = static_cast<int>(rep.g_hat.rows());
  const auto res =
      beta_region_test(state.solve_beta().stacked(), beta_true.stacked(),
                       rep.g_hat, sigma, state.n_bar(), alpha_level);
  rep.chi2_stat = res.stat;
  rep.covered = res.covered;
  return rep;
}

}  // namespace icb
