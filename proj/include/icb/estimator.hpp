#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "icb/domain.hpp"

namespace icb {

/// Thrown when the design is not yet identifiable (pre burn-in, or a
/// singular Gram). Callers fall back to uniform actions.
struct EstimatorNotReady : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Smallest eigenvalue of a symmetric matrix via a dense selfadjoint
/// eigensolve. Rejects matrices that are asymmetric beyond tolerance.
inline double min_eigenvalue(const Matrix& m, double sym_tol = 1e-8) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("min_eigenvalue: matrix must be square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > sym_tol * scale) {
    throw std::invalid_argument("min_eigenvalue: matrix is not symmetric");
  }
  Matrix s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("min_eigenvalue: eigensolver failed");
  }
  return solver.eigenvalues().minCoeff();
}

/// Exploration floor p_t = min(1, c * n^-exponent). The exponent stays
/// below 1/2 so that n * p_t^2 diverges.
struct ClippingSchedule {
  double c = 0.1;
  double exponent = 0.49;

  void validate() const {
    if (c <= 0.0) throw std::invalid_argument("ClippingSchedule: c <= 0");
    if (exponent <= 0.0 || exponent >= 0.5) {
      throw std::invalid_argument(
          "ClippingSchedule: exponent must lie in (0, 0.5)");
    }
  }

  double rate(long n_bar) const {
    if (n_bar <= 0) return 1.0;
    return std::min(1.0, c * std::pow(static_cast<double>(n_bar), -exponent));
  }
};

/// Accumulated sufficient statistics for the online OLS over transformed
/// covariates:
///   gram     = sum of xt xt'   (2d x 2d)
///   moment   = sum of xt * r   (2d)
///   raw_gram = sum of x x'     (d x d, untransformed per-unit contexts)
/// plus the running count and sum of squared rewards (for residual
/// statistics, recovered algebraically as rss = sum r^2 - 2 b'beta +
/// beta' A beta).
class EstimatorState {
 public:
  explicit EstimatorState(int d)
      : d_(d),
        gram_(Matrix::Zero(2 * d, 2 * d)),
        moment_(Vector::Zero(2 * d)),
        raw_gram_(Matrix::Zero(d, d)) {
    if (d < 1) throw std::invalid_argument("EstimatorState: d < 1");
  }

  int d() const { return d_; }
  long n_bar() const { return n_bar_; }
  const Matrix& gram() const { return gram_; }
  const Vector& moment() const { return moment_; }
  const Matrix& raw_gram() const { return raw_gram_; }

  /// Folds one round of observations into the sufficient statistics.
  void absorb_round(const Matrix& xt, const Vector& rewards,
                    const Matrix& raw_contexts) {
    const Eigen::Index n = xt.rows();
    if (rewards.size() != n || raw_contexts.rows() != n) {
      throw std::invalid_argument("absorb_round: row counts differ");
    }
    if (xt.cols() != 2 * d_ || raw_contexts.cols() != d_) {
      throw std::invalid_argument("absorb_round: column counts differ");
    }
    gram_ += xt.transpose() * xt;
    gram_ = 0.5 * (gram_ + gram_.transpose().eval());  // keep exact symmetry
    moment_ += xt.transpose() * rewards;
    raw_gram_ += raw_contexts.transpose() * raw_contexts;
    raw_gram_ = 0.5 * (raw_gram_ + raw_gram_.transpose().eval());
    sum_r_sq_ += rewards.squaredNorm();
    n_bar_ += n;
    dirty_ = true;
  }

  /// True once the Gram matrix is numerically invertible.
  bool ready() const {
    if (n_bar_ < 2 * d_) return false;
    const double tr = gram_.trace();
    if (tr <= 0.0) return false;
    return min_eigenvalue(gram_) >= 1e-10 * tr;
  }

  /// OLS solve beta = gram^-1 moment via LDLT. Throws EstimatorNotReady
  /// below the identifiability floor.
  BetaVector solve_beta() const {
    if (!ready()) {
      throw EstimatorNotReady("solve_beta: design not identifiable yet");
    }
    if (dirty_) {
      Eigen::LDLT<Matrix> ldlt(gram_);
      if (ldlt.info() != Eigen::Success) {
        throw EstimatorNotReady("solve_beta: factorization failed");
      }
      cached_beta_ = ldlt.solve(moment_);
      dirty_ = false;
    }
    return BetaVector::from_stacked(cached_beta_);
  }

  /// Residual noise scale sqrt(rss / (n - 2d)) at the current solution.
  /// Falls back to the minimum-norm solution when the Gram is singular,
  /// so an exactly-fit degenerate design still reports zero noise.
  double sigma_hat() const {
    if (n_bar_ <= 2 * d_) {
      throw EstimatorNotReady("sigma_hat: need more than 2d observations");
    }
    const Vector beta = ready() ? solve_beta().stacked() : minimum_norm_beta();
    const double rss = sum_r_sq_ - 2.0 * beta.dot(moment_) +
                       beta.dot(gram_ * beta);
    return std::sqrt(std::max(0.0, rss) / static_cast<double>(n_bar_ - 2 * d_));
  }

  /// Plain-text state dump for checkpoint/debug; not a stability contract.
  std::string snapshot() const {
    std::ostringstream os;
    os.precision(17);
    os << "estimator_state d=" << d_ << " n_bar=" << n_bar_
       << " sum_r_sq=" << sum_r_sq_ << "\n";
    os << "gram\n" << gram_ << "\nmoment\n" << moment_.transpose()
       << "\nraw_gram\n" << raw_gram_ << "\n";
    return os.str();
  }

 private:
  Vector minimum_norm_beta() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram_);
    const Vector& ev = es.eigenvalues();
    const double floor = 1e-12 * std::max(1.0, ev.maxCoeff());
    Vector inv = Vector::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev[i] > floor) inv[i] = 1.0 / ev[i];
    }
    return es.eigenvectors() * inv.asDiagonal() *
           es.eigenvectors().transpose() * moment_;
  }

  int d_;
  Matrix gram_;
  Vector moment_;
  Matrix raw_gram_;
  long n_bar_ = 0;
  double sum_r_sq_ = 0.0;
  mutable Vector cached_beta_;
  mutable bool dirty_ = true;
};

/// The per-round exploration check: true when the transformed design's
/// minimum eigenvalue (per unit) has fallen below p_t times the raw
/// design's, in which case the round is served uniformly at random.
inline bool clipping_triggered(const EstimatorState& state,
                               const ClippingSchedule& schedule) {
  if (state.n_bar() == 0) return true;
  const double n = static_cast<double>(state.n_bar());
  const double lhs = min_eigenvalue(state.gram() / n);
  const double rhs = min_eigenvalue(state.raw_gram() / n);
  return lhs < schedule.rate(state.n_bar()) * rhs;
}

/// Finite-sample tail bound on P(||beta_hat - beta||_1 > h):
/// min(1, 4d exp(-h^2 n p^2 / (16 d^3 sigma^2 L_w^2 L_x^2))). Diagnostic
/// only; typically very conservative at simulation scale.
inline double tail_bound(double h, const EstimatorState& state,
                         const ClippingSchedule& schedule,
                         const BoundConstants& consts, int d) {
  if (h <= 0.0) throw std::invalid_argument("tail_bound: h must be > 0");
  consts.validate();
  const double n = static_cast<double>(state.n_bar());
  const double p = schedule.rate(state.n_bar());
  const double dd = static_cast<double>(d);
  const double denom = 16.0 * dd * dd * dd * consts.sigma * consts.sigma *
                       consts.l_w * consts.l_w * consts.l_x * consts.l_x;
  const double expo = -h * h * n * p * p / denom;
  return std::min(1.0, 4.0 * dd * std::exp(expo));
}

}  // namespace icb
