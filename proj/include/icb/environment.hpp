#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "icb/domain.hpp"
#include "icb/prng.hpp"

namespace icb {

/// Per-feature marginal used when sampling context rows.
struct ContextFeatureSpec {
  enum class Kind { constant, normal, uniform };
  Kind kind = Kind::constant;
  double a = 1.0;  // constant value / normal mean / uniform lower bound
  double b = 0.0;  // normal variance / uniform upper bound

  static ContextFeatureSpec constant(double v) {
    return {Kind::constant, v, 0.0};
  }
  static ContextFeatureSpec normal(double mean, double variance) {
    if (variance < 0) throw std::invalid_argument("normal: variance < 0");
    return {Kind::normal, mean, variance};
  }
  static ContextFeatureSpec uniform(double lo, double hi) {
    if (hi < lo) throw std::invalid_argument("uniform: hi < lo");
    return {Kind::uniform, lo, hi};
  }
};

/// Interference matrix law: identity, or the two-component uniform mixture
/// with a fair coin deciding the (negative, positive) component per entry.
struct WSpec {
  enum class Kind { identity, mixture };
  Kind kind = Kind::identity;
  double neg_lo = 0.0, neg_hi = 0.0;
  double pos_lo = 0.0, pos_hi = 0.0;
  bool symmetric = true;

  static WSpec identity() { return {}; }
  static WSpec mixture(double nlo, double nhi, double plo, double phi,
                       bool symmetric) {
    if (nhi < nlo || phi < plo) {
      throw std::invalid_argument("WSpec: mixture bounds out of order");
    }
    WSpec w;
    w.kind = Kind::mixture;
    w.neg_lo = nlo;
    w.neg_hi = nhi;
    w.pos_lo = plo;
    w.pos_hi = phi;
    w.symmetric = symmetric;
    return w;
  }
};

struct EnvironmentConfig {
  int horizon = 100;
  double poisson_lambda = 5.0;
  int d = 3;
  std::vector<ContextFeatureSpec> context;
  WSpec w = WSpec::identity();
  std::optional<BetaVector> beta_fixed;
  // When no fixed beta is given, each replication draws
  // beta0 ~ U(beta0_range)^d and beta1 ~ U(beta1_range)^d once.
  std::pair<double, double> beta0_range{1.0, 3.0};
  std::pair<double, double> beta1_range{-2.0, 5.0};
  double sigma = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("EnvironmentConfig: T < 1");
    if (poisson_lambda <= 0) {
      throw std::invalid_argument("EnvironmentConfig: lambda <= 0");
    }
    if (d < 1) throw std::invalid_argument("EnvironmentConfig: d < 1");
    if (static_cast<int>(context.size()) != d) {
      throw std::invalid_argument(
          "EnvironmentConfig: context spec count != d");
    }
    if (sigma < 0) throw std::invalid_argument("EnvironmentConfig: sigma < 0");
    if (beta_fixed && beta_fixed->dim() != d) {
      throw std::invalid_argument("EnvironmentConfig: beta dimension != d");
    }
  }

  BetaVector draw_beta(Rng& rng) const {
    if (beta_fixed) return *beta_fixed;
    Vector b0(d), b1(d);
    std::uniform_real_distribution<double> u0(beta0_range.first,
                                              beta0_range.second);
    std::uniform_real_distribution<double> u1(beta1_range.first,
                                              beta1_range.second);
    for (int k = 0; k < d; ++k) b0[k] = u0(rng);
    for (int k = 0; k < d; ++k) b1[k] = u1(rng);
    return BetaVector(std::move(b0), std::move(b1));
  }
};

/// Draws a round's interference matrix. Off-diagonals are mixture draws on
/// the upper triangle, mirrored when symmetric and drawn independently for
/// the lower triangle otherwise.
inline Matrix gen_interference_matrix(const WSpec& spec, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("gen_interference_matrix: n < 1");
  Matrix w = Matrix::Identity(n, n);
  if (spec.kind == WSpec::Kind::identity || n == 1) return w;
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> neg(spec.neg_lo, spec.neg_hi);
  std::uniform_real_distribution<double> pos(spec.pos_lo, spec.pos_hi);
  auto draw = [&]() { return coin(rng) ? neg(rng) : pos(rng); };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      w(i, j) = draw();
      w(j, i) = spec.symmetric ? w(i, j) : draw();
    }
  }
  return w;
}

inline Vector gen_context_row(const std::vector<ContextFeatureSpec>& spec,
                              Rng& rng) {
  Vector x(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto& f = spec[k];
    switch (f.kind) {
      case ContextFeatureSpec::Kind::constant:
        x[static_cast<Eigen::Index>(k)] = f.a;
        break;
      case ContextFeatureSpec::Kind::normal: {
        std::normal_distribution<double> dist(f.a, std::sqrt(f.b));
        x[static_cast<Eigen::Index>(k)] = dist(rng);
        break;
      }
      case ContextFeatureSpec::Kind::uniform: {
        std::uniform_real_distribution<double> dist(f.a, f.b);
        x[static_cast<Eigen::Index>(k)] = dist(rng);
        break;
      }
    }
  }
  return x;
}

/// Samples one round: unit count ~ max(1, Poisson(lambda)), i.i.d. context
/// rows, and an interference matrix per the spec. Actions and rewards stay
/// unset.
inline Round gen_round(const EnvironmentConfig& config, Rng& rng, int t) {
  std::poisson_distribution<int> pois(config.poisson_lambda);
  const int n = std::max(1, pois(rng));
  Matrix contexts(n, config.d);
  for (int i = 0; i < n; ++i) {
    contexts.row(i) = gen_context_row(config.context, rng).transpose();
  }
  Matrix w = gen_interference_matrix(config.w, n, rng);
  return Round::make(t, std::move(contexts), std::move(w));
}

/// Realizes rewards for a round with actions set: the transformed-row mean
/// plus i.i.d. Gaussian noise. With sigma = 0 this equals the expected
/// reward exactly.
inline Vector realize_rewards(const Round& round, const BetaVector& beta_true,
                              double sigma, Rng& rng) {
  if (!round.actions) {
    throw std::logic_error("realize_rewards: round has no actions");
  }
  const Matrix xt = transform_covariates(round).xt;
  Vector r = xt * beta_true.stacked();
  if (sigma > 0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (Eigen::Index i = 0; i < r.size(); ++i) r[i] += noise(rng);
  }
  return r;
}

/// Expected per-round regret of the realized actions against the per-unit
/// oracle, evaluated with the true coefficients (noise-free identity).
inline double round_expected_regret(const Round& round,
                                    const BetaVector& beta_true) {
  if (!round.actions) {
    throw std::logic_error("round_expected_regret: round has no actions");
  }
  const Vector omega = interference_weights(round.interference).omega;
  double total = 0.0;
  for (int i = 0; i < round.n_units; ++i) {
    const Vector x = round.contexts.row(i).transpose();
    const OracleDecision dec = oracle_action(omega[i], x, beta_true);
    const int a = (*round.actions)[i];
    const double value_star = omega[i] * x.dot(beta_true.arm(dec.arm));
    const double value_act = omega[i] * x.dot(beta_true.arm(a));
    total += value_star - value_act;
  }
  return total;
}

struct MonteCarloValue {
  double v_star = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

/// Monte Carlo estimate of the optimal value: the expectation over context
/// and interference weight of the oracle-selected arm's mean reward.
/// Samples whole rounds from the generative process and averages per-unit
/// values until at least m_samples units are seen.
inline MonteCarloValue monte_carlo_v_star(const EnvironmentConfig& config,
                                          const BetaVector& beta_true,
                                          long m_samples, Rng& rng) {
  if (m_samples < 1000) {
    throw std::invalid_argument("monte_carlo_v_star: m_samples < 1000");
  }
  double sum = 0.0, sum_sq = 0.0;
  long n = 0;
  int t = 0;
  while (n < m_samples) {
    Round round = gen_round(config, rng, ++t);
    const Vector omega = interference_weights(round.interference).omega;
    for (int i = 0; i < round.n_units; ++i) {
      const Vector x = round.contexts.row(i).transpose();
      const OracleDecision dec = oracle_action(omega[i], x, beta_true);
      const double v = omega[i] * x.dot(beta_true.arm(dec.arm));
      sum += v;
      sum_sq += v * v;
      ++n;
    }
  }
  const double m = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum_sq / static_cast<double>(n) - m * m);
  return {m, std::sqrt(var / static_cast<double>(n)), n};
}

}  // namespace icb
