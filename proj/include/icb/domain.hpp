#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace icb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ActionVector = Eigen::VectorXi;

/// Stacked regression coefficients, one d-vector per arm.
struct BetaVector {
  Vector beta0;
  Vector beta1;

  BetaVector() = default;
  BetaVector(Vector b0, Vector b1)
      : beta0(std::move(b0)), beta1(std::move(b1)) {
    if (beta0.size() != beta1.size()) {
      throw std::invalid_argument("BetaVector: arm blocks differ in length");
    }
  }

  int dim() const { return static_cast<int>(beta0.size()); }

  const Vector& arm(int a) const { return a == 0 ? beta0 : beta1; }

  /// (beta0', beta1')' in R^{2d}.
  Vector stacked() const {
    Vector s(2 * dim());
    s.head(dim()) = beta0;
    s.tail(dim()) = beta1;
    return s;
  }

  static BetaVector from_stacked(const Vector& s) {
    if (s.size() % 2 != 0) {
      throw std::invalid_argument("BetaVector: stacked length must be even");
    }
    const int d = static_cast<int>(s.size()) / 2;
    return BetaVector(s.head(d), s.tail(d));
  }

  Vector advantage() const { return beta1 - beta0; }
};

/// Bound constants used by diagnostic formulas (tail bound, exploration
/// bounds). Not enforced on data; purely inputs to closed-form expressions.
struct BoundConstants {
  double l_x = 1.0;        // context norm bound
  double l_w = 1.0;        // interference row/column absolute-sum bound
  double lambda_min = 1.0; // context covariance eigenvalue floor
  double u_bound = 1.0;    // expected-reward bound
  double gamma = 1.0;      // margin exponent
  double sigma = 1.0;      // noise standard deviation

  void validate() const {
    if (l_x <= 0 || l_w <= 0 || lambda_min <= 0 || u_bound <= 0 || gamma <= 0 ||
        sigma <= 0) {
      throw std::invalid_argument("BoundConstants: all fields must be > 0");
    }
  }
};

enum class WValidation { strict, lenient };

/// Checks (and in lenient mode repairs) an interference matrix: unit
/// diagonal, off-diagonal entries in [-1, 1]. Returns the number of
/// repaired entries in lenient mode; throws in strict mode.
inline int validate_interference(Matrix& w, WValidation mode) {
  if (w.rows() != w.cols()) {
    throw std::invalid_argument("interference matrix must be square");
  }
  int fixes = 0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 1.0) {
      if (mode == WValidation::strict) {
        throw std::invalid_argument("interference diagonal must equal 1");
      }
      w(i, i) = 1.0;
      ++fixes;
    }
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (i == j) continue;
      if (w(i, j) < -1.0 || w(i, j) > 1.0 || !std::isfinite(w(i, j))) {
        if (mode == WValidation::strict) {
          throw std::invalid_argument(
              "interference off-diagonals must lie in [-1, 1]");
        }
        w(i, j) = std::isfinite(w(i, j)) ? std::clamp(w(i, j), -1.0, 1.0) : 0.0;
        ++fixes;
      }
    }
  }
  return fixes;
}

/// One interaction epoch: contexts and interference arrive first, actions
/// and rewards are filled in as the round plays out. Immutable value
/// semantics; "mutation" is copying with a field set.
struct Round {
  int t = 0;
  int n_units = 0;
  Matrix contexts;      // n_units x d
  Matrix interference;  // n_units x n_units
  std::optional<ActionVector> actions;
  std::optional<Vector> rewards;

  static Round make(int t, Matrix contexts, Matrix interference,
                    WValidation mode = WValidation::strict) {
    Round r;
    r.t = t;
    r.n_units = static_cast<int>(contexts.rows());
    if (r.n_units < 1) throw std::invalid_argument("Round: no units");
    if (interference.rows() != r.n_units ||
        interference.cols() != r.n_units) {
      throw std::invalid_argument(
          "Round: interference shape does not match unit count");
    }
    validate_interference(interference, mode);
    r.contexts = std::move(contexts);
    r.interference = std::move(interference);
    return r;
  }

  int d() const { return static_cast<int>(contexts.cols()); }

  Round with_actions(ActionVector a) const {
    if (a.size() != n_units) {
      throw std::invalid_argument("Round: action vector length mismatch");
    }
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] != 0 && a[i] != 1) {
        throw std::invalid_argument("Round: actions must be 0/1");
      }
    }
    Round r = *this;
    r.actions = std::move(a);
    return r;
  }

  Round with_rewards(Vector rw) const {
    if (rw.size() != n_units) {
      throw std::invalid_argument("Round: reward vector length mismatch");
    }
    Round r = *this;
    r.rewards = std::move(rw);
    return r;
  }
};

struct InterferenceWeights {
  Vector omega;  // omega_i = sum_j w_ji (column sums)
};

/// Column sums of the interference matrix. The weight of unit i aggregates
/// how strongly everyone (including i itself) is influenced by i.
inline InterferenceWeights interference_weights(const Matrix& w) {
  if (w.rows() != w.cols()) {
    throw std::invalid_argument("interference_weights: matrix must be square");
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 1.0) {
      throw std::invalid_argument(
          "interference_weights: diagonal must equal 1");
    }
  }
  return {w.colwise().sum().transpose()};
}

struct TransformedCovariates {
  Matrix xt;  // n_units x 2d
};

/// Builds the per-unit 2d-row feature matrix: row i holds the arm-0 and
/// arm-1 neighborhood aggregates sum_j w_ij (1-a_j) x_j and
/// sum_j w_ij a_j x_j.
inline Matrix transform_with_actions(const Matrix& contexts, const Matrix& w,
                                     const ActionVector& actions) {
  const Eigen::Index n = contexts.rows();
  const Eigen::Index d = contexts.cols();
  if (w.rows() != n || w.cols() != n) {
    throw std::invalid_argument("transform: interference shape mismatch");
  }
  if (actions.size() != n) {
    throw std::invalid_argument("transform: action length mismatch");
  }
  Matrix xt = Matrix::Zero(n, 2 * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      if (actions[j] == 0) {
        xt.row(i).head(d) += wij * contexts.row(j);
      } else {
        xt.row(i).tail(d) += wij * contexts.row(j);
      }
    }
  }
  return xt;
}

inline TransformedCovariates transform_covariates(const Round& round) {
  if (!round.actions) {
    throw std::logic_error("transform_covariates: round has no actions");
  }
  return {transform_with_actions(round.contexts, round.interference,
                                 *round.actions)};
}

/// Inner product of a transformed row with the stacked coefficients.
inline double expected_reward(const Vector& xt_row, const BetaVector& beta) {
  if (xt_row.size() != 2 * beta.dim()) {
    throw std::invalid_argument("expected_reward: dimension mismatch");
  }
  const int d = beta.dim();
  return xt_row.head(d).dot(beta.beta0) + xt_row.tail(d).dot(beta.beta1);
}

struct OracleDecision {
  int arm;           // in {0, 1}
  double advantage;  // zeta = omega * x'(beta1 - beta0)
};

/// Per-unit optimal rule: arm 1 iff the weighted advantage is strictly
/// positive. Ties (including omega == 0) resolve to arm 0.
inline OracleDecision oracle_action(double omega, const Vector& x,
                                    const BetaVector& beta) {
  if (x.size() != beta.dim()) {
    throw std::invalid_argument("oracle_action: dimension mismatch");
  }
  const double zeta = omega * x.dot(beta.advantage());
  return {zeta > 0.0 ? 1 : 0, zeta};
}

}  // namespace icb
