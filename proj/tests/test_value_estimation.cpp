#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <random>
#include <sstream>

#include "icb/value_estimation.hpp"

using namespace icb;

namespace {

LogEntry entry(int t, int i, double omega, int action, int pi_hat,
               double kappa, double reward, double mu_hat) {
  LogEntry e;
  e.t = t;
  e.i = i;
  e.omega = omega;
  e.x = Vector::Constant(1, 1.0);
  e.action = action;
  e.pi_hat = pi_hat;
  e.kappa_snapshot = kappa;
  e.reward = reward;
  e.mu_hat = mu_hat;
  e.xt_row_pihat = Vector::Zero(2);
  return e;
}

EvaluationLog random_log(std::mt19937_64& rng, int n, double kappa_max = 0.6) {
  std::uniform_real_distribution<double> u01(0.0, 1.0), ur(-2.0, 2.0);
  EvaluationLog log;
  for (int k = 0; k < n; ++k) {
    const int a = u01(rng) < 0.5 ? 1 : 0;
    const int pi = u01(rng) < 0.5 ? 1 : 0;
    log.append(entry(k / 5 + 1, k % 5, ur(rng), a, pi, u01(rng) * kappa_max,
                     ur(rng), ur(rng)));
  }
  return log;
}

}  // namespace

TEST_CASE("ipw on closed-form cases", "[value]") {
  EvaluationLog one;
  one.append(entry(1, 0, 1.0, 1, 1, 0.5, 2.0, 0.0));
  CHECK(ipw_estimate(one) == Catch::Approx(4.0));

  EvaluationLog disagree;
  for (int k = 0; k < 5; ++k) {
    disagree.append(entry(1, k, 1.0, 0, 1, 0.3, 2.0, 0.0));
  }
  CHECK(ipw_estimate(disagree) == Catch::Approx(0.0));

  EvaluationLog plain;
  for (int k = 0; k < 4; ++k) {
    plain.append(entry(1, k, 1.0, 1, 1, 0.0, 1.0 + k, 0.0));
  }
  CHECK(ipw_estimate(plain) == Catch::Approx(2.5));  // mean of rewards

  CHECK_THROWS_AS(ipw_estimate(EvaluationLog{}), std::invalid_argument);
}

TEST_CASE("dm is the mean of model predictions", "[value]") {
  EvaluationLog one;
  one.append(entry(1, 0, 1.0, 0, 0, 0.0, 0.0, 1.7));
  CHECK(dm_estimate(one) == Catch::Approx(1.7));
}

TEST_CASE("dr on closed-form cases", "[value]") {
  EvaluationLog one;
  one.append(entry(1, 0, 1.0, 1, 1, 0.0, 2.0, 1.0));
  CHECK(dr_estimate(one) == Catch::Approx(2.0));
}

TEST_CASE("dr collapses to dm when residuals vanish", "[value]") {
  std::mt19937_64 rng(41);
  EvaluationLog log = random_log(rng, 200);
  EvaluationLog exact;
  for (const auto& e : log.entries()) {
    LogEntry c = e;
    c.reward = c.mu_hat;  // residual-free log
    exact.append(std::move(c));
  }
  CHECK(std::fabs(dr_estimate(exact) - dm_estimate(exact)) < 1e-12);
}

TEST_CASE("dr collapses to ipw when the model is zero", "[value]") {
  std::mt19937_64 rng(43);
  EvaluationLog log = random_log(rng, 200);
  EvaluationLog zeroed;
  for (const auto& e : log.entries()) {
    LogEntry c = e;
    c.mu_hat = 0.0;
    zeroed.append(std::move(c));
  }
  CHECK(std::fabs(dr_estimate(zeroed) - ipw_estimate(zeroed)) < 1e-12);
}

TEST_CASE("estimates are invariant to entry permutation", "[value]") {
  std::mt19937_64 rng(47);
  EvaluationLog log = random_log(rng, 100);
  std::vector<LogEntry> shuffled(log.entries().begin(), log.entries().end());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EvaluationLog perm;
  for (auto& e : shuffled) perm.append(std::move(e));
  CHECK(ipw_estimate(log) == Catch::Approx(ipw_estimate(perm)).epsilon(1e-12));
  CHECK(dm_estimate(log) == Catch::Approx(dm_estimate(perm)).epsilon(1e-12));
  CHECK(dr_estimate(log) == Catch::Approx(dr_estimate(perm)).epsilon(1e-12));
}

TEST_CASE("kappa snapshots are floored away from one", "[value]") {
  EvaluationLog log;
  log.append(entry(1, 0, 1.0, 1, 1, 0.9999, 1.0, 0.0));
  CHECK(log.entries()[0].kappa_snapshot == Catch::Approx(0.99));
  CHECK(log.kappa_clamps() == 1);
  CHECK_THROWS_AS(log.append(entry(1, 1, 1.0, 1, 1, -0.1, 1.0, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("sigma_v on closed-form cases", "[value]") {
  // kappa = 0 and a constant policy-value term: only the noise term is left.
  EvaluationLog constant;
  for (int k = 0; k < 10; ++k) {
    constant.append(entry(1, k, 2.0, 1, 1, 0.0, 0.0, 0.0));
  }
  constant.set_final(BetaVector(Vector::Constant(1, 0.5),
                                Vector::Constant(1, 1.5)),
                     0.0);
  CHECK(sigma_v_estimate(constant, 1.0) == Catch::Approx(1.0));

  // sigma = 0 with per-unit values {0, 2} equally: population variance 1.
  EvaluationLog two;
  two.append(entry(1, 0, 0.0, 1, 1, 0.0, 0.0, 0.0));  // omega 0 -> value 0
  two.append(entry(1, 1, 2.0, 1, 1, 0.0, 0.0, 0.0));  // omega 2 -> value 2
  two.set_final(BetaVector(Vector::Constant(1, 0.5),
                           Vector::Constant(1, 1.0)),
                0.0);
  CHECK(sigma_v_estimate(two, 0.0) == Catch::Approx(1.0));

  // Doubling sigma at kappa = 0 raises sigma_v^2 by exactly 3 sigma^2.
  const double s1 = sigma_v_estimate(two, 1.0);
  const double s2 = sigma_v_estimate(two, 2.0);
  CHECK(s2 * s2 - s1 * s1 == Catch::Approx(3.0));

  EvaluationLog one;
  one.append(entry(1, 0, 1.0, 1, 1, 0.0, 0.0, 0.0));
  one.set_final(BetaVector(Vector::Zero(1), Vector::Zero(1)), 0.0);
  CHECK_THROWS_AS(sigma_v_estimate(one, 1.0), std::invalid_argument);
}

TEST_CASE("value report assembles the z interval", "[value]") {
  EvaluationLog log;
  for (int k = 0; k < 50; ++k) {
    log.append(entry(1, k, 1.0, 1, 1, 0.0, 3.0, 3.0));
  }
  log.set_final(BetaVector(Vector::Constant(1, 3.0), Vector::Constant(1, 3.0)),
                0.0);
  ValueReport rep = value_report(log, 0.0, 0.05);
  // Degenerate log: all estimators agree and the interval has zero width.
  CHECK(rep.v_ipw == Catch::Approx(3.0));
  CHECK(rep.v_dm == Catch::Approx(3.0));
  CHECK(rep.v_dr == Catch::Approx(3.0));
  CHECK(rep.sigma_v_hat == Catch::Approx(0.0).margin(1e-12));
  CHECK(rep.ci_lower == Catch::Approx(3.0));
  CHECK(rep.ci_upper == Catch::Approx(3.0));
  CHECK(rep.n_bar == 50);

  // Nonzero sigma: the half width is z_{alpha/2} sigma_v / sqrt(n).
  ValueReport noisy = value_report(log, 2.0, 0.05);
  const double half = 1.959963984540054 * noisy.sigma_v_hat / std::sqrt(50.0);
  CHECK(noisy.ci_upper - noisy.v_dr == Catch::Approx(half).epsilon(1e-9));
  CHECK(noisy.v_dr - noisy.ci_lower == Catch::Approx(half).epsilon(1e-9));
  CHECK_THROWS_AS(value_report(log, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("evaluation log round-trips through its CSV schema", "[value]") {
  std::mt19937_64 rng(53);
  EvaluationLog log = random_log(rng, 25);
  std::ostringstream os;
  log.write_csv(os);
  std::istringstream is(os.str());
  EvaluationLog back = EvaluationLog::read_csv(is);
  REQUIRE(back.size() == log.size());
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto& a = log.entries()[k];
    const auto& b = back.entries()[k];
    CHECK(a.t == b.t);
    CHECK(a.i == b.i);
    CHECK(a.omega == b.omega);
    CHECK(a.action == b.action);
    CHECK(a.pi_hat == b.pi_hat);
    CHECK(a.kappa_snapshot == b.kappa_snapshot);
    CHECK(a.reward == b.reward);
    CHECK(a.mu_hat == b.mu_hat);
  }
  std::istringstream bad("wrong,header\n");
  CHECK_THROWS_AS(EvaluationLog::read_csv(bad), std::runtime_error);
}
