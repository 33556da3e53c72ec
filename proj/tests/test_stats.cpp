#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "icb/stats.hpp"

using namespace icb;

// Reference values computed with an independent implementation
// (scipy.stats) and frozen here.
TEST_CASE("normal quantile matches reference values", "[stats]") {
  CHECK(stats::normal_quantile(0.975) ==
        Catch::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(stats::normal_quantile(0.995) ==
        Catch::Approx(2.5758293035489004).epsilon(1e-9));
  CHECK(stats::normal_quantile(0.84) ==
        Catch::Approx(0.994457883209753).epsilon(1e-9));
  CHECK(stats::normal_quantile(0.05) ==
        Catch::Approx(-1.6448536269514729).epsilon(1e-9));
  CHECK(stats::normal_quantile(1e-9) ==
        Catch::Approx(-5.9978070150076865).epsilon(1e-8));
  CHECK(stats::normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(stats::normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(stats::normal_quantile(1.0), std::domain_error);
}

TEST_CASE("normal cdf and quantile are inverses", "[stats]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int k = 0; k < 200; ++k) {
    double p = u(rng);
    CHECK(stats::normal_cdf(stats::normal_quantile(p)) ==
          Catch::Approx(p).epsilon(1e-10));
  }
  CHECK(stats::normal_cdf(1.96) ==
        Catch::Approx(0.9750021048517795).epsilon(1e-12));
}

TEST_CASE("chi-square quantile matches reference values", "[stats]") {
  CHECK(stats::chi_square_quantile(0.95, 2) ==
        Catch::Approx(5.991464547107979).epsilon(1e-8));
  CHECK(stats::chi_square_quantile(0.95, 6) ==
        Catch::Approx(12.591587243743977).epsilon(1e-8));
  CHECK(stats::chi_square_quantile(0.95, 1) ==
        Catch::Approx(3.841458820694124).epsilon(1e-8));
  CHECK(stats::chi_square_quantile(0.95, 4) ==
        Catch::Approx(9.487729036781154).epsilon(1e-8));
  CHECK(stats::chi_square_quantile(0.95, 10) ==
        Catch::Approx(18.307038053275146).epsilon(1e-8));
  CHECK(stats::chi_square_quantile(0.95, 32) ==
        Catch::Approx(46.19425952027847).epsilon(1e-8));
  CHECK(stats::chi_square_quantile(0.99, 2) ==
        Catch::Approx(9.21034037197618).epsilon(1e-8));
  CHECK(stats::chi_square_quantile(0.5, 6) ==
        Catch::Approx(5.348120627447118).epsilon(1e-8));
  CHECK(stats::chi_square_quantile(0.001, 6) ==
        Catch::Approx(0.3810667551368064).epsilon(1e-7));
}

TEST_CASE("chi-square cdf and quantile are inverses", "[stats]") {
  CHECK(stats::regularized_gamma_p(3.0, 2.5) ==
        Catch::Approx(0.45618688411667035).epsilon(1e-12));
  for (int df : {1, 2, 3, 6, 14}) {
    for (double p : {0.01, 0.2, 0.5, 0.9, 0.99}) {
      double x = stats::chi_square_quantile(p, df);
      CHECK(stats::chi_square_cdf(x, df) == Catch::Approx(p).epsilon(1e-8));
    }
  }
}

TEST_CASE("wilson interval brackets the point estimate", "[stats]") {
  auto [lo, hi] = stats::wilson_interval(190, 200, 0.95);
  CHECK(lo < 0.95);
  CHECK(hi > 0.95);
  CHECK(lo > 0.90);
  CHECK(hi < 0.99);
  auto [lo0, hi0] = stats::wilson_interval(0, 50, 0.95);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
}

TEST_CASE("variance helpers", "[stats]") {
  std::vector<double> two{0.0, 2.0};
  CHECK(stats::population_variance(two) == Catch::Approx(1.0));
  CHECK(stats::sample_variance(two) == Catch::Approx(2.0));
  CHECK(stats::mean(two) == Catch::Approx(1.0));
  CHECK(stats::median({3.0, 1.0, 2.0}) == Catch::Approx(2.0));
  CHECK(stats::median({4.0, 1.0, 2.0, 3.0}) == Catch::Approx(2.5));
}
