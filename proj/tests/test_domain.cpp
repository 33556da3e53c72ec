#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "icb/domain.hpp"

using namespace icb;

namespace {

// Independent oracle: the term-by-term double sum over units and
// neighbors, never touching the transform code path.
double brute_force_unit_reward(const Matrix& x, const Matrix& w,
                               const ActionVector& a, const BetaVector& beta,
                               int i) {
  double r = 0.0;
  for (int j = 0; j < x.rows(); ++j) {
    const double f = a[j] == 0 ? x.row(j).dot(beta.beta0)
                               : x.row(j).dot(beta.beta1);
    r += w(i, j) * f;
  }
  return r;
}

double brute_force_total_reward(const Matrix& x, const Matrix& w,
                                const ActionVector& a,
                                const BetaVector& beta) {
  double total = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    total += brute_force_unit_reward(x, w, a, beta, i);
  }
  return total;
}

struct RandomInstance {
  Matrix x;
  Matrix w;
  BetaVector beta;
};

RandomInstance random_instance(std::mt19937_64& rng, int max_n, int max_d) {
  std::uniform_int_distribution<int> nd(1, max_n), dd(1, max_d);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uw(-1.0, 1.0),
      ub(-3.0, 3.0);
  const int n = nd(rng), d = dd(rng);
  RandomInstance inst;
  inst.x = Matrix::NullaryExpr(n, d, [&]() { return ux(rng); });
  inst.w = Matrix::NullaryExpr(n, n, [&]() { return uw(rng); });
  for (int i = 0; i < n; ++i) inst.w(i, i) = 1.0;
  Vector b0 = Vector::NullaryExpr(d, [&]() { return ub(rng); });
  Vector b1 = Vector::NullaryExpr(d, [&]() { return ub(rng); });
  inst.beta = BetaVector(b0, b1);
  return inst;
}

}  // namespace

TEST_CASE("interference weights are column sums", "[domain]") {
  CHECK(interference_weights(Matrix::Identity(2, 2)).omega.isApprox(
      Vector::Constant(2, 1.0)));

  Matrix w(2, 2);
  w << 1.0, 0.5, 0.2, 1.0;
  Vector omega = interference_weights(w).omega;
  CHECK(omega[0] == Catch::Approx(1.2));
  CHECK(omega[1] == Catch::Approx(1.5));

  Matrix cancel(2, 2);
  cancel << 1.0, -1.0, -1.0, 1.0;
  omega = interference_weights(cancel).omega;
  CHECK(omega[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(omega[1] == Catch::Approx(0.0).margin(1e-15));

  CHECK_THROWS_AS(interference_weights(Matrix::Zero(2, 3)),
                  std::invalid_argument);
  Matrix bad_diag(2, 2);
  bad_diag << 0.9, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(interference_weights(bad_diag), std::invalid_argument);
}

TEST_CASE("transform matches the hand-worked example", "[domain]") {
  Matrix w(2, 2);
  w << 1.0, 0.5, 0.2, 1.0;
  Matrix x(2, 1);
  x << 2.0, 3.0;
  ActionVector a(2);
  a << 0, 1;
  Round round = Round::make(1, x, w).with_actions(a);
  Matrix xt = transform_covariates(round).xt;
  CHECK(xt(0, 0) == Catch::Approx(2.0));
  CHECK(xt(0, 1) == Catch::Approx(1.5));
  CHECK(xt(1, 0) == Catch::Approx(0.4));
  CHECK(xt(1, 1) == Catch::Approx(3.0));
}

TEST_CASE("identity interference routes own context to the chosen arm",
          "[domain]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  Matrix x = Matrix::NullaryExpr(4, 3, [&]() { return ux(rng); });
  ActionVector ones = ActionVector::Constant(4, 1);
  Round round = Round::make(1, x, Matrix::Identity(4, 4)).with_actions(ones);
  Matrix xt = transform_covariates(round).xt;
  CHECK(xt.leftCols(3).isZero(1e-15));
  CHECK(xt.rightCols(3).isApprox(x, 1e-15));
}

TEST_CASE("arm blocks always sum to the neighborhood aggregate", "[domain]") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    RandomInstance inst = random_instance(rng, 6, 3);
    const int n = static_cast<int>(inst.x.rows());
    const int d = static_cast<int>(inst.x.cols());
    std::bernoulli_distribution coin(0.5);
    ActionVector a(n);
    for (int i = 0; i < n; ++i) a[i] = coin(rng) ? 1 : 0;
    Matrix xt = transform_with_actions(inst.x, inst.w, a);
    Matrix wx = inst.w * inst.x;
    CHECK((xt.leftCols(d) + xt.rightCols(d) - wx).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("missing actions is a state error", "[domain]") {
  Round round = Round::make(1, Matrix::Ones(2, 1), Matrix::Identity(2, 2));
  CHECK_THROWS_AS(transform_covariates(round), std::logic_error);
}

TEST_CASE("expected reward is the stacked inner product", "[domain]") {
  BetaVector beta(Vector::Constant(1, 1.0), Vector::Constant(1, 2.0));
  Vector row(2);
  row << 2.0, 1.5;
  CHECK(expected_reward(row, beta) == Catch::Approx(5.0));
  CHECK(expected_reward(Vector::Zero(2), beta) == Catch::Approx(0.0));

  // Basis rows extract stacked components.
  BetaVector beta3(Vector::LinSpaced(3, 1.0, 3.0), Vector::LinSpaced(3, 4.0, 6.0));
  for (int k = 0; k < 6; ++k) {
    Vector basis = Vector::Zero(6);
    basis[k] = 1.0;
    CHECK(expected_reward(basis, beta3) ==
          Catch::Approx(beta3.stacked()[k]));
  }
  CHECK_THROWS_AS(expected_reward(Vector::Zero(4), beta3),
                  std::invalid_argument);
}

TEST_CASE("aggregation identity over random instances", "[domain]") {
  std::mt19937_64 rng(17);
  std::bernoulli_distribution coin(0.5);
  for (int k = 0; k < 1000; ++k) {
    RandomInstance inst = random_instance(rng, 8, 4);
    const int n = static_cast<int>(inst.x.rows());
    ActionVector a(n);
    for (int i = 0; i < n; ++i) a[i] = coin(rng) ? 1 : 0;

    Matrix xt = transform_with_actions(inst.x, inst.w, a);
    double via_transform = 0.0;
    for (int i = 0; i < n; ++i) {
      via_transform += expected_reward(xt.row(i).transpose(), inst.beta);
    }
    // Right-hand side of the aggregation identity: sum_i omega_i f(x_i, a_i).
    Vector omega = interference_weights(inst.w).omega;
    double via_weights = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = a[i] == 0 ? inst.x.row(i).dot(inst.beta.beta0)
                                 : inst.x.row(i).dot(inst.beta.beta1);
      via_weights += omega[i] * f;
    }
    double via_brute = brute_force_total_reward(inst.x, inst.w, a, inst.beta);
    REQUIRE(std::fabs(via_transform - via_weights) < 1e-10);
    REQUIRE(std::fabs(via_transform - via_brute) < 1e-10);
  }
}

TEST_CASE("oracle decisions and sign flips", "[domain]") {
  BetaVector beta(Vector::Constant(1, 0.0), Vector::Constant(1, 2.0));
  Vector x = Vector::Constant(1, 1.0);
  CHECK(oracle_action(1.0, x, beta).arm == 1);
  CHECK(oracle_action(-1.0, x, beta).arm == 0);
  CHECK(oracle_action(0.0, x, beta).arm == 0);  // tie convention
  CHECK(oracle_action(1.0, x, beta).advantage == Catch::Approx(2.0));
}

TEST_CASE("oracle argmax is invariant to positive scaling of omega",
          "[domain]") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-3.0, 3.0), c(0.01, 50.0);
  for (int k = 0; k < 200; ++k) {
    Vector x = Vector::NullaryExpr(3, [&]() { return u(rng); });
    BetaVector beta(Vector::NullaryExpr(3, [&]() { return u(rng); }),
                    Vector::NullaryExpr(3, [&]() { return u(rng); }));
    double omega = u(rng);
    CHECK(oracle_action(omega, x, beta).arm ==
          oracle_action(c(rng) * omega, x, beta).arm);
  }
}

TEST_CASE("per-unit oracle attains the exhaustive joint optimum", "[domain]") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 50; ++k) {
    RandomInstance inst = random_instance(rng, 8, 3);
    const int n = static_cast<int>(inst.x.rows());
    Vector omega = interference_weights(inst.w).omega;

    ActionVector oracle(n);
    for (int i = 0; i < n; ++i) {
      oracle[i] =
          oracle_action(omega[i], inst.x.row(i).transpose(), inst.beta).arm;
    }
    double oracle_value =
        brute_force_total_reward(inst.x, inst.w, oracle, inst.beta);

    double best = -1e300;
    for (int mask = 0; mask < (1 << n); ++mask) {
      ActionVector a(n);
      for (int i = 0; i < n; ++i) a[i] = (mask >> i) & 1;
      best = std::max(best,
                      brute_force_total_reward(inst.x, inst.w, a, inst.beta));
    }
    REQUIRE(oracle_value == Catch::Approx(best).margin(1e-9));
  }
}

TEST_CASE("interference validation modes", "[domain]") {
  Matrix w(2, 2);
  w << 1.0, 1.5, -2.0, 0.8;
  Matrix strict_copy = w;
  CHECK_THROWS_AS(validate_interference(strict_copy, WValidation::strict),
                  std::invalid_argument);
  Matrix lenient_copy = w;
  int fixes = validate_interference(lenient_copy, WValidation::lenient);
  CHECK(fixes == 3);
  CHECK(lenient_copy(0, 0) == 1.0);
  CHECK(lenient_copy(1, 1) == 1.0);
  CHECK(lenient_copy(0, 1) == 1.0);
  CHECK(lenient_copy(1, 0) == -1.0);
}

TEST_CASE("round construction validates shapes and actions", "[domain]") {
  CHECK_THROWS_AS(Round::make(1, Matrix::Ones(2, 1), Matrix::Identity(3, 3)),
                  std::invalid_argument);
  Round r = Round::make(1, Matrix::Ones(2, 1), Matrix::Identity(2, 2));
  ActionVector bad(2);
  bad << 0, 2;
  CHECK_THROWS_AS(r.with_actions(bad), std::invalid_argument);
  CHECK_THROWS_AS(r.with_rewards(Vector::Zero(3)), std::invalid_argument);
}
