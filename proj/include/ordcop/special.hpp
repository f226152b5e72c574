#pragma once

// Univariate distribution helpers shared by every module. Infinite arguments are
// legal everywhere: cdf(-inf) = 0, cdf(+inf) = 1, quantile(0) = -inf, quantile(1) = +inf.

#include <cmath>
#include <limits>
#include <numbers>

namespace ordcop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Upper tail 1 - Phi(x), accurate for large x.
inline double norm_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Phi(b) - Phi(a) evaluated on the side of zero that avoids cancellation.
inline double norm_interval(double a, double b) {
  if (a > 0.0) return norm_sf(a) - norm_sf(b);
  return norm_cdf(b) - norm_cdf(a);
}

double norm_quantile(double p);

double logistic_cdf(double x);
double logistic_quantile(double p);

double t_pdf(double x, double nu);
double t_cdf(double x, double nu);
double t_quantile(double p, double nu);

// Quantile of the chi-square distribution with nu degrees of freedom.
double chisq_quantile(double p, double nu);

}  // namespace ordcop
