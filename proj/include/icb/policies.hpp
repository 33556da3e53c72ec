#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "icb/domain.hpp"
#include "icb/estimator.hpp"
#include "icb/prng.hpp"
#include "icb/value_estimation.hpp"

namespace icb {

enum class Algorithm {
  eg,
  ucb,
  ts,
  classical_eg,
  classical_ucb,
  classical_ts,
};

inline bool is_classical(Algorithm a) {
  return a == Algorithm::classical_eg || a == Algorithm::classical_ucb ||
         a == Algorithm::classical_ts;
}

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::eg: return "eg";
    case Algorithm::ucb: return "ucb";
    case Algorithm::ts: return "ts";
    case Algorithm::classical_eg: return "classical_eg";
    case Algorithm::classical_ucb: return "classical_ucb";
    case Algorithm::classical_ts: return "classical_ts";
  }
  return "?";
}

struct PolicyConfig {
  Algorithm algorithm = Algorithm::eg;
  int k_arms = 2;  // decision rules are written as argmax, but only K=2 is wired up
  int t0 = 5;      // burn-in rounds of uniform actions
  double alpha = 1.0;  // UCB width multiplier
  double v = 1.0;      // TS scale
  Vector prior_mean;   // 2d; zeros when empty
  Matrix prior_cov;    // 2d x 2d; identity when empty
  double eg_c = 1.0;
  std::optional<double> eg_constant_eps;  // fixed epsilon instead of the schedule
  ClippingSchedule clipping;
  std::optional<double> known_sigma;  // noise sd for TS posterior; plug-in when unset
  std::uint64_t seed = 0;

  void validate() const {
    if (k_arms != 2) throw std::invalid_argument("PolicyConfig: k_arms must be 2");
    if (t0 < 1) throw std::invalid_argument("PolicyConfig: t0 < 1");
    if (alpha < 0) throw std::invalid_argument("PolicyConfig: alpha < 0");
    if (v <= 0) throw std::invalid_argument("PolicyConfig: v <= 0");
    if (eg_c <= 0) throw std::invalid_argument("PolicyConfig: eg_c <= 0");
    if (eg_constant_eps &&
        (*eg_constant_eps < 0.0 || *eg_constant_eps > 1.0)) {
      throw std::invalid_argument("PolicyConfig: constant epsilon out of [0,1]");
    }
    clipping.validate();
  }
};

/// Default burn-in length: enough uniform rounds that the transformed Gram
/// is generically invertible.
inline int default_burn_in(int d, double expected_units_per_round) {
  const double need = 4.0 * d / std::max(1.0, expected_units_per_round);
  return std::max(5, static_cast<int>(std::ceil(need)));
}

/// Running disagreement count between realized actions and the estimated
/// policy in force at decision time.
struct ExplorationTracker {
  long disagreements = 0;
  long total = 0;
  std::vector<std::pair<long, double>> per_checkpoint;  // (n_bar, kappa)

  double kappa() const {
    return total > 0 ? static_cast<double>(disagreements) / total : 0.0;
  }
  void record(bool disagree) {
    if (disagree) ++disagreements;
    ++total;
  }
  void checkpoint(long n_bar) { per_checkpoint.emplace_back(n_bar, kappa()); }
};

/// Exploration schedule for epsilon-greedy over the flattened unit queue:
/// epsilon_q = min(1, c log(q+1)/sqrt(q+1)).
inline double eg_epsilon(long q, double c) {
  if (q < 1) throw std::invalid_argument("eg_epsilon: q < 1");
  if (c <= 0) throw std::invalid_argument("eg_epsilon: c <= 0");
  const double qq = static_cast<double>(q) + 1.0;
  return std::min(1.0, c * std::log(qq) / std::sqrt(qq));
}

/// Epsilon-greedy arm choice: greedy on the weighted advantage with
/// probability 1-eps, uniform otherwise.
inline int eg_select(double omega, const Vector& x, const BetaVector& beta_hat,
                     double eps, Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  if (u01(rng) < eps) {
    return u01(rng) < 0.5 ? 0 : 1;
  }
  return oracle_action(omega, x, beta_hat).arm;
}

/// UCB arm choice. cov_block0/1 are the arm-diagonal d x d blocks of the
/// inverse transformed Gram; a numerically negative quadratic form is
/// clamped to zero and counted through clamp_counter.
inline int ucb_select(double omega, const Vector& x, const BetaVector& beta_hat,
                      const Matrix& cov_block0, const Matrix& cov_block1,
                      double alpha, long* clamp_counter = nullptr) {
  auto width = [&](const Matrix& block) {
    double q = x.dot(block * x);
    if (q < 0.0) {
      if (clamp_counter) ++*clamp_counter;
      q = 0.0;
    }
    return std::sqrt(q);
  };
  const double ucb0 = omega * x.dot(beta_hat.beta0) +
                      alpha * std::fabs(omega) * width(cov_block0);
  const double ucb1 = omega * x.dot(beta_hat.beta1) +
                      alpha * std::fabs(omega) * width(cov_block1);
  return ucb1 > ucb0 ? 1 : 0;
}

struct TsPosterior {
  Vector mean;  // 2d
  Matrix cov;   // 2d x 2d
};

/// Conjugate-normal posterior of the stacked coefficients given the
/// accumulated sufficient statistics:
///   precision = prior_cov^-1 + gram / sigma^2
///   mean      = precision^-1 (prior_cov^-1 prior_mean + moment / sigma^2)
inline TsPosterior ts_posterior(const EstimatorState& state,
                                const Vector& prior_mean,
                                const Matrix& prior_cov, double sigma) {
  const int p = 2 * state.d();
  if (prior_mean.size() != p || prior_cov.rows() != p || prior_cov.cols() != p) {
    throw std::invalid_argument("ts_posterior: prior dimension mismatch");
  }
  if (sigma <= 0) throw std::invalid_argument("ts_posterior: sigma <= 0");
  Eigen::LLT<Matrix> prior_llt(prior_cov);
  if (prior_llt.info() != Eigen::Success) {
    throw std::invalid_argument("ts_posterior: prior covariance not SPD");
  }
  const Matrix prior_precision = prior_llt.solve(Matrix::Identity(p, p));
  const double inv_s2 = 1.0 / (sigma * sigma);
  Matrix precision = prior_precision + state.gram() * inv_s2;
  precision = 0.5 * (precision + precision.transpose().eval());
  Eigen::LDLT<Matrix> ldlt(precision);
  TsPosterior post;
  post.cov = ldlt.solve(Matrix::Identity(p, p));
  post.cov = 0.5 * (post.cov + post.cov.transpose().eval());
  post.mean =
      ldlt.solve(prior_precision * prior_mean + state.moment() * inv_s2);
  return post;
}

/// Thompson-sampling arm choice: draws per-arm coefficients from the
/// posterior arm blocks (cross-arm covariance excluded), scaled by v, and
/// picks the larger weighted advantage.
inline int ts_select(double omega, const Vector& x, const TsPosterior& post,
                     double v, Rng& rng) {
  const int d = static_cast<int>(x.size());
  if (post.mean.size() != 2 * d) {
    throw std::invalid_argument("ts_select: posterior dimension mismatch");
  }
  std::normal_distribution<double> std_normal(0.0, 1.0);
  auto sample_arm = [&](int a) {
    const Vector mean = post.mean.segment(a * d, d);
    Matrix block = post.cov.block(a * d, a * d, d, d);
    Eigen::LLT<Matrix> llt(block);
    if (llt.info() != Eigen::Success) {
      block += 1e-10 * Matrix::Identity(d, d);
      llt.compute(block);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("ts_select: posterior block not PSD");
      }
    }
    Vector z(d);
    for (int k = 0; k < d; ++k) z[k] = std_normal(rng);
    const Vector correlated = llt.matrixL() * z;
    return Vector(mean + v * correlated);
  };
  const Vector b0 = sample_arm(0);
  const Vector b1 = sample_arm(1);
  const double v0 = omega * x.dot(b0);
  const double v1 = omega * x.dot(b1);
  return v1 > v0 ? 1 : 0;
}

/// How a round's actions were produced.
enum class RoundMode { burn_in, not_ready, clipped, policy };

struct RoundOutcome {
  ActionVector actions;
  Vector rewards;
  RoundMode mode = RoundMode::burn_in;
  double kappa_before = 0.0;          // running kappa at decision time
  std::vector<int> pi_hat;            // estimated-optimal arms; empty pre-estimate
};

/// Drives one policy through the online loop: burn-in, clipping fallback,
/// per-unit selection, log recording and estimator updates. Rounds made
/// before the first usable estimate are kept pending and backfilled into
/// the tracker and evaluation log once an estimate exists, so the log has
/// one entry per unit over the whole run.
class BanditRunner {
 public:
  BanditRunner(PolicyConfig config, int d)
      : config_(std::move(config)),
        d_(d),
        estimator_(d),
        rng_(config_.seed) {
    config_.validate();
    if (config_.prior_mean.size() == 0) {
      config_.prior_mean = Vector::Zero(2 * d);
    }
    if (config_.prior_cov.size() == 0) {
      config_.prior_cov = Matrix::Identity(2 * d, 2 * d);
    }
    if (config_.prior_mean.size() != 2 * d || config_.prior_cov.rows() != 2 * d) {
      throw std::invalid_argument("BanditRunner: prior dimension mismatch");
    }
  }

  /// Plays one round: picks actions, obtains rewards through realize
  /// (a callable Vector(const ActionVector&) evaluated under the true
  /// interference), and updates all state.
  template <typename RewardFn>
  RoundOutcome play_round(const Round& round, RewardFn&& realize) {
    ++rounds_played_;
    const int n = round.n_units;
    const Matrix w_eff = is_classical(config_.algorithm)
                             ? Matrix(Matrix::Identity(n, n))
                             : round.interference;
    const Vector omega = interference_weights(w_eff).omega;

    RoundOutcome out;
    out.kappa_before = tracker_.kappa();
    if (have_estimate_) {
      out.pi_hat.resize(n);
      for (int i = 0; i < n; ++i) {
        out.pi_hat[i] =
            oracle_action(omega[i], round.contexts.row(i).transpose(),
                          beta_hat_)
                .arm;
      }
    }

    out.mode = decide_mode();
    out.actions = choose_actions(round, omega, out);
    out.rewards = realize(out.actions);
    if (out.rewards.size() != n) {
      throw std::runtime_error("play_round: reward callback length mismatch");
    }

    record_round(round, w_eff, omega, out);

    const Matrix xt = transform_with_actions(round.contexts, w_eff, out.actions);
    estimator_.absorb_round(xt, out.rewards, round.contexts);

    if (have_estimate_) {
      beta_hat_ = estimator_.solve_beta();
    } else if (rounds_played_ >= config_.t0 && estimator_.ready()) {
      beta_hat_ = estimator_.solve_beta();
      have_estimate_ = true;
      backfill_pending();
    }
    tracker_.checkpoint(estimator_.n_bar());
    return out;
  }

  const EstimatorState& estimator() const { return estimator_; }
  const ExplorationTracker& tracker() const { return tracker_; }
  bool have_estimate() const { return have_estimate_; }
  const BetaVector& beta_hat() const {
    if (!have_estimate_) throw EstimatorNotReady("beta_hat: no estimate yet");
    return beta_hat_;
  }
  long ucb_clamps() const { return ucb_clamps_; }
  const PolicyConfig& config() const { return config_; }

  /// Attaches the final estimates and returns the log.
  const EvaluationLog& finalized_log() {
    if (have_estimate_) log_.set_final(beta_hat_, tracker_.kappa());
    return log_;
  }
  const EvaluationLog& log() const { return log_; }

 private:
  struct PendingRound {
    int t;
    Matrix contexts;
    Matrix w_eff;
    Vector omega;
    ActionVector actions;
    Vector rewards;
  };

  RoundMode decide_mode() {
    if (rounds_played_ <= config_.t0) return RoundMode::burn_in;
    if (!have_estimate_) return RoundMode::not_ready;
    if (clipping_triggered(estimator_, config_.clipping)) {
      return RoundMode::clipped;
    }
    return RoundMode::policy;
  }

  ActionVector choose_actions(const Round& round, const Vector& omega,
                              const RoundOutcome& out) {
    const int n = round.n_units;
    ActionVector actions(n);
    if (out.mode != RoundMode::policy) {
      std::bernoulli_distribution coin(0.5);
      for (int i = 0; i < n; ++i) actions[i] = coin(rng_) ? 1 : 0;
      return actions;
    }
    switch (config_.algorithm) {
      case Algorithm::eg:
      case Algorithm::classical_eg: {
        for (int i = 0; i < n; ++i) {
          const long q = estimator_.n_bar() + i + 1;
          const double eps = config_.eg_constant_eps
                                 ? *config_.eg_constant_eps
                                 : eg_epsilon(q, config_.eg_c);
          actions[i] = eg_select(omega[i], round.contexts.row(i).transpose(),
                                 beta_hat_, eps, rng_);
        }
        break;
      }
      case Algorithm::ucb:
      case Algorithm::classical_ucb: {
        Eigen::LDLT<Matrix> ldlt(estimator_.gram());
        const Matrix gram_inv =
            ldlt.solve(Matrix::Identity(2 * d_, 2 * d_));
        const Matrix block0 = gram_inv.topLeftCorner(d_, d_);
        const Matrix block1 = gram_inv.bottomRightCorner(d_, d_);
        for (int i = 0; i < n; ++i) {
          actions[i] = ucb_select(omega[i], round.contexts.row(i).transpose(),
                                  beta_hat_, block0, block1, config_.alpha,
                                  &ucb_clamps_);
        }
        break;
      }
      case Algorithm::ts:
      case Algorithm::classical_ts: {
        const TsPosterior post =
            ts_posterior(estimator_, config_.prior_mean, config_.prior_cov,
                         ts_sigma());
        for (int i = 0; i < n; ++i) {
          actions[i] = ts_select(omega[i], round.contexts.row(i).transpose(),
                                 post, config_.v, rng_);
        }
        break;
      }
    }
    return actions;
  }

  double ts_sigma() const {
    if (config_.known_sigma) return *config_.known_sigma;
    if (estimator_.n_bar() > 2 * d_ + 1) {
      const double s = estimator_.sigma_hat();
      if (s > 1e-8) return s;
    }
    return 1.0;  // pre-plug-in fallback
  }

  void record_round(const Round& round, const Matrix& w_eff,
                    const Vector& omega, const RoundOutcome& out) {
    const int n = round.n_units;
    if (!have_estimate_) {
      pending_.push_back({round.t, round.contexts, w_eff, omega, out.actions,
                          out.rewards});
      return;
    }
    ActionVector pi_vec(n);
    for (int i = 0; i < n; ++i) pi_vec[i] = out.pi_hat[i];
    const Matrix xt_pihat =
        transform_with_actions(round.contexts, w_eff, pi_vec);
    const Vector beta_stacked = beta_hat_.stacked();
    for (int i = 0; i < n; ++i) {
      LogEntry e;
      e.t = round.t;
      e.i = i;
      e.omega = omega[i];
      e.x = round.contexts.row(i).transpose();
      e.action = out.actions[i];
      e.pi_hat = out.pi_hat[i];
      e.kappa_snapshot = out.kappa_before;
      e.reward = out.rewards[i];
      e.mu_hat = xt_pihat.row(i).dot(beta_stacked);
      e.xt_row_pihat = xt_pihat.row(i).transpose();
      log_.append(std::move(e));
    }
    for (int i = 0; i < n; ++i) {
      tracker_.record(out.actions[i] != out.pi_hat[i]);
    }
  }

  /// Evaluates the rounds played before the first estimate existed against
  /// that first estimate: their disagreement flags seed the tracker (the
  /// burn-in disagreement rate becomes the first kappa snapshot) and their
  /// log entries are filled in with the same estimate.
  void backfill_pending() {
    long disagree = 0, total = 0;
    std::vector<ActionVector> pi_vecs;
    pi_vecs.reserve(pending_.size());
    for (const auto& p : pending_) {
      const int n = static_cast<int>(p.contexts.rows());
      ActionVector pi_vec(n);
      for (int i = 0; i < n; ++i) {
        pi_vec[i] = oracle_action(p.omega[i], p.contexts.row(i).transpose(),
                                  beta_hat_)
                        .arm;
        if (pi_vec[i] != p.actions[i]) ++disagree;
        ++total;
      }
      pi_vecs.push_back(std::move(pi_vec));
    }
    const double rate =
        total > 0 ? static_cast<double>(disagree) / total : 0.0;
    const Vector beta_stacked = beta_hat_.stacked();
    for (std::size_t k = 0; k < pending_.size(); ++k) {
      const auto& p = pending_[k];
      const ActionVector& pi_vec = pi_vecs[k];
      const Matrix xt_pihat =
          transform_with_actions(p.contexts, p.w_eff, pi_vec);
      const int n = static_cast<int>(p.contexts.rows());
      for (int i = 0; i < n; ++i) {
        LogEntry e;
        e.t = p.t;
        e.i = i;
        e.omega = p.omega[i];
        e.x = p.contexts.row(i).transpose();
        e.action = p.actions[i];
        e.pi_hat = pi_vec[i];
        e.kappa_snapshot = rate;
        e.reward = p.rewards[i];
        e.mu_hat = xt_pihat.row(i).dot(beta_stacked);
        e.xt_row_pihat = xt_pihat.row(i).transpose();
        log_.append(std::move(e));
      }
    }
    tracker_.disagreements += disagree;
    tracker_.total += total;
    pending_.clear();
  }

  PolicyConfig config_;
  int d_;
  EstimatorState estimator_;
  ExplorationTracker tracker_;
  EvaluationLog log_;
  Rng rng_;
  int rounds_played_ = 0;
  bool have_estimate_ = false;
  BetaVector beta_hat_;
  std::vector<PendingRound> pending_;
  long ucb_clamps_ = 0;
};

}  // namespace icb
