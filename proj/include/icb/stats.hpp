#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace icb::stats {

/// Standard normal CDF.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation refined with one Halley step against
/// erfc, giving near machine precision over (0, 1). Reference values used
/// by the test suite: Phi^-1(0.975) = 1.959963984540054,
/// Phi^-1(0.995) = 2.5758293035489004.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must be in (0,1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  // One Halley refinement.
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

/// Regularized lower incomplete gamma P(a, x), by series expansion for
/// x < a+1 and continued fraction otherwise. Absolute accuracy ~1e-14.
inline double regularized_gamma_p(double a, double x) {
  if (a <= 0.0) throw std::domain_error("regularized_gamma_p: a <= 0");
  if (x < 0.0) throw std::domain_error("regularized_gamma_p: x < 0");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  const int max_iter = 500;
  const double eps = 1e-16;
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < max_iter; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * eps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz's continued fraction for Q(a, x).
  const double fpmin = std::numeric_limits<double>::min() / eps;
  double bb = x + 1.0 - a;
  double cc = 1.0 / fpmin;
  double d = 1.0 / bb;
  double h = d;
  for (int i = 1; i <= max_iter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    bb += 2.0;
    d = an * d + bb;
    if (std::fabs(d) < fpmin) d = fpmin;
    cc = bb + an / cc;
    if (std::fabs(cc) < fpmin) cc = fpmin;
    d = 1.0 / d;
    double del = d * cc;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

/// Chi-square CDF with df degrees of freedom.
inline double chi_square_cdf(double x, int df) {
  if (df < 1) throw std::domain_error("chi_square_cdf: df < 1");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

/// Chi-square quantile: the x with P(X <= x) = p. Wilson-Hilferty start,
/// then Newton on the CDF. Reference values in the test suite:
/// quantile(0.95, 2) = 5.991464547107979, quantile(0.95, 6) = 12.591587243743977.
inline double chi_square_quantile(double p, int df) {
  if (df < 1) throw std::domain_error("chi_square_quantile: df < 1");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("chi_square_quantile: p must be in (0,1)");
  }
  const double z = normal_quantile(p);
  const double k = static_cast<double>(df);
  double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  double x = k * t * t * t;
  if (x <= 0.0) x = 1e-10;
  const double a = 0.5 * k;
  const double gln = std::lgamma(a);
  for (int it = 0; it < 100; ++it) {
    double f = regularized_gamma_p(a, 0.5 * x) - p;
    // d/dx P(a, x/2) = density of chi-square.
    double logpdf = (a - 1.0) * std::log(0.5 * x) - 0.5 * x - gln -
                    std::log(2.0);
    double pdf = std::exp(logpdf);
    if (pdf <= 0.0) break;
    double step = f / pdf;
    double xn = x - step;
    if (xn <= 0.0) xn = 0.5 * x;
    if (std::fabs(xn - x) < 1e-12 * std::max(1.0, x)) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(long successes, long n,
                                                 double conf = 0.95) {
  if (n <= 0) throw std::domain_error("wilson_interval: n <= 0");
  const double z = normal_quantile(0.5 + conf / 2.0);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::domain_error("mean: empty");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Population variance (divide by n).
inline double population_variance(const std::vector<double>& v) {
  if (v.empty()) throw std::domain_error("population_variance: empty");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

/// Sample variance (divide by n-1).
inline double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw std::domain_error("sample_variance: n < 2");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::domain_error("median: empty");
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (hi + v[mid - 1]);
}

}  // namespace icb::stats
