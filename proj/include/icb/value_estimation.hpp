#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "icb/domain.hpp"
#include "icb/stats.hpp"

namespace icb {

/// One unit's record in the decision log. pi_hat, kappa_snapshot, mu_hat and
/// xt_row_pihat are captured against the estimate in force when the decision
/// was made (burn-in rounds are backfilled with the first available
/// estimate).
struct LogEntry {
  int t = 0;
  int i = 0;
  double omega = 0.0;
  Vector x;
  int action = 0;
  int pi_hat = 0;
  double kappa_snapshot = 0.0;
  double reward = 0.0;
  double mu_hat = 0.0;
  Vector xt_row_pihat;  // transformed row with all round actions set to pi_hat
};

/// Decision log feeding the optimal-value estimators. The propensity
/// denominator 1 - kappa is kept >= kappa_floor_delta by clamping
/// kappa_snapshot at append time; clamps are counted, not fatal.
class EvaluationLog {
 public:
  static constexpr double kKappaFloorDelta = 0.01;

  void append(LogEntry e) {
    if (e.pi_hat != 0 && e.pi_hat != 1) {
      throw std::invalid_argument("EvaluationLog: pi_hat must be 0/1");
    }
    if (e.kappa_snapshot < 0.0) {
      throw std::invalid_argument("EvaluationLog: kappa_snapshot < 0");
    }
    if (e.kappa_snapshot > 1.0 - kKappaFloorDelta) {
      e.kappa_snapshot = 1.0 - kKappaFloorDelta;
      ++kappa_clamps_;
    }
    entries_.push_back(std::move(e));
  }

  const std::vector<LogEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  long kappa_clamps() const { return kappa_clamps_; }

  /// Final estimates attached by the runner at the end of a run; used as
  /// the kappa_infinity / beta stand-ins by the variance plug-in.
  void set_final(BetaVector beta, double kappa) {
    final_beta_ = std::move(beta);
    final_kappa_ = kappa;
  }
  const std::optional<BetaVector>& final_beta() const { return final_beta_; }
  std::optional<double> final_kappa() const { return final_kappa_; }

  /// CSV export: one row per unit, schema
  /// t,i,omega,action,pi_hat,kappa_snapshot,reward,mu_hat.
  void write_csv(std::ostream& os) const {
    os << "t,i,omega,action,pi_hat,kappa_snapshot,reward,mu_hat\n";
    char buf[512];
    for (const auto& e : entries_) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%d,%d,%.17g,%.17g,%.17g\n",
                    e.t, e.i, e.omega, e.action, e.pi_hat, e.kappa_snapshot,
                    e.reward, e.mu_hat);
      os << buf;
    }
  }

  /// Parses the CSV schema above. Context vectors are not part of the
  /// schema, so estimators needing x (the variance plug-in) cannot run on a
  /// re-imported log.
  static EvaluationLog read_csv(std::istream& is) {
    EvaluationLog log;
    std::string line;
    if (!std::getline(is, line)) {
      throw std::runtime_error("EvaluationLog: empty CSV");
    }
    if (line != "t,i,omega,action,pi_hat,kappa_snapshot,reward,mu_hat") {
      throw std::runtime_error("EvaluationLog: unexpected CSV header");
    }
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      LogEntry e;
      std::istringstream ls(line);
      std::string f;
      auto next = [&]() {
        if (!std::getline(ls, f, ',')) {
          throw std::runtime_error("EvaluationLog: short CSV row");
        }
        return f;
      };
      e.t = std::stoi(next());
      e.i = std::stoi(next());
      e.omega = std::stod(next());
      e.action = std::stoi(next());
      e.pi_hat = std::stoi(next());
      e.kappa_snapshot = std::stod(next());
      e.reward = std::stod(next());
      e.mu_hat = std::stod(next());
      log.append(std::move(e));
    }
    return log;
  }

 private:
  std::vector<LogEntry> entries_;
  long kappa_clamps_ = 0;
  std::optional<BetaVector> final_beta_;
  std::optional<double> final_kappa_;
};

namespace detail {
inline void require_nonempty(const EvaluationLog& log, const char* who) {
  if (log.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty log");
  }
}
}  // namespace detail

/// Inverse probability weighting: mean of 1{a = pi_hat}/(1 - kappa) * r.
inline double ipw_estimate(const EvaluationLog& log) {
  detail::require_nonempty(log, "ipw_estimate");
  double sum = 0.0;
  for (const auto& e : log.entries()) {
    if (e.action == e.pi_hat) {
      sum += e.reward / (1.0 - e.kappa_snapshot);
    }
  }
  return sum / static_cast<double>(log.size());
}

/// Direct method: mean of the model-predicted reward under the estimated
/// policy (the aggregation-identity form).
inline double dm_estimate(const EvaluationLog& log) {
  detail::require_nonempty(log, "dm_estimate");
  double sum = 0.0;
  for (const auto& e : log.entries()) sum += e.mu_hat;
  return sum / static_cast<double>(log.size());
}

/// Doubly robust estimator: the direct term plus the propensity-weighted
/// residual augmentation.
inline double dr_estimate(const EvaluationLog& log) {
  detail::require_nonempty(log, "dr_estimate");
  double sum = 0.0;
  for (const auto& e : log.entries()) {
    double term = e.mu_hat;
    if (e.action == e.pi_hat) {
      term += (e.reward - e.mu_hat) / (1.0 - e.kappa_snapshot);
    }
    sum += term;
  }
  return sum / static_cast<double>(log.size());
}

/// Plug-in asymptotic standard deviation of the DR estimator:
/// sigma^2/(1 - kappa_final) plus the population variance of the per-unit
/// value omega * x' beta_{pi_hat} under the final coefficient estimate.
inline double sigma_v_estimate(const EvaluationLog& log, double sigma) {
  detail::require_nonempty(log, "sigma_v_estimate");
  if (log.size() < 2) {
    throw std::invalid_argument("sigma_v_estimate: need at least 2 entries");
  }
  if (!log.final_beta()) {
    throw std::logic_error("sigma_v_estimate: final beta not attached");
  }
  double kappa = log.final_kappa()
                     ? *log.final_kappa()
                     : log.entries().back().kappa_snapshot;
  kappa = std::min(kappa, 1.0 - EvaluationLog::kKappaFloorDelta);
  const BetaVector& beta = *log.final_beta();
  std::vector<double> values;
  values.reserve(log.size());
  for (const auto& e : log.entries()) {
    values.push_back(e.omega * e.x.dot(beta.arm(e.pi_hat)));
  }
  const double noise_term = sigma * sigma / (1.0 - kappa);
  const double value_term = stats::population_variance(values);
  return std::sqrt(noise_term + value_term);
}

struct ValueReport {
  double v_ipw = 0.0;
  double v_dm = 0.0;
  double v_dr = 0.0;
  double sigma_v_hat = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  long n_bar = 0;
};

/// All three value estimates plus the z-interval around the DR point
/// estimate at level 1 - alpha_level.
inline ValueReport value_report(const EvaluationLog& log, double sigma,
                                double alpha_level) {
  if (alpha_level <= 0.0 || alpha_level >= 1.0) {
    throw std::invalid_argument("value_report: alpha_level out of (0,1)");
  }
  ValueReport rep;
  rep.v_ipw = ipw_estimate(log);
  rep.v_dm = dm_estimate(log);
  rep.v_dr = dr_estimate(log);
  rep.sigma_v_hat = sigma_v_estimate(log, sigma);
  rep.n_bar = static_cast<long>(log.size());
  const double z = stats::normal_quantile(1.0 - alpha_level / 2.0);
  const double half = z * rep.sigma_v_hat / std::sqrt(rep.n_bar);
  rep.ci_lower = rep.v_dr - half;
  rep.ci_upper = rep.v_dr + half;
  return rep;
}

}  // namespace icb
