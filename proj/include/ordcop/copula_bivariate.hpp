#pragma once

// Closed-form bivariate copulas for the temporal (lag-1) dependence of one
// ordinal series, plus Kendall's tau conversions and test-grade samplers.

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <span>
#include <string>

namespace ordcop {

enum class Family { BVN, BVT, Frank, Gumbel, SurvivalGumbel, Independence };

struct BivCopulaFamily {
  Family tag = Family::Independence;
  double nu = 0.0;  // degrees of freedom, BVT only

  static BivCopulaFamily bvn() { return {Family::BVN, 0.0}; }
  static BivCopulaFamily bvt(double nu) { return {Family::BVT, nu}; }
  static BivCopulaFamily frank() { return {Family::Frank, 0.0}; }
  static BivCopulaFamily gumbel() { return {Family::Gumbel, 0.0}; }
  static BivCopulaFamily survival_gumbel() { return {Family::SurvivalGumbel, 0.0}; }
  static BivCopulaFamily independence() { return {Family::Independence, 0.0}; }

  bool operator==(const BivCopulaFamily&) const = default;
};

struct BivCopulaSpec {
  BivCopulaFamily family;
  double theta = 0.0;
};

std::string family_name(const BivCopulaFamily& f);
// Accepts "bvn", "bvt" (needs nu), "frank", "gumbel", "sgumbel"/"survival_gumbel", "independence".
BivCopulaFamily parse_family(const std::string& name, double nu = 0.0);

// Throws DomainError naming the family and the violated bound.
void validate(const BivCopulaSpec& spec);

// Frank parameters with |theta| below this evaluate the independence copula.
inline constexpr double kFrankIndependenceBand = 1e-8;

double biv_cdf(const BivCopulaSpec& spec, double u1, double u2);

// C(b1,b2) - C(a1,b2) - C(b1,a2) + C(a1,a2), clamped at zero.
double biv_pmf_rect(const BivCopulaSpec& spec, double a1, double b1, double a2, double b2);

double kendall_tau(const BivCopulaSpec& spec);
double param_from_tau(const BivCopulaFamily& family, double tau);

/// Lower-orthant bivariate normal probability P(X <= h, Y <= k) with correlation
/// rho. Drezner-Wesolowsky/Genz Gauss-Legendre scheme, absolute error below 1e-14.
double bvn_cdf(double h, double k, double rho);

/// Lower-orthant bivariate Student-t probability. Integer nu (1..200) uses the
/// Dunnett-Sobel finite series; other nu fall back to bvt_cdf_quadrature.
double bvt_cdf(double h, double k, double rho, double nu);

/// Same probability by adaptive 1-D integration of the conditional t cdf,
/// absolute tolerance 1e-9. Serves as the oracle for the series path.
double bvt_cdf_quadrature(double h, double k, double rho, double nu);

// n x 2 draws from the copula.
Eigen::MatrixX2d sample_biv_copula(const BivCopulaSpec& spec, std::size_t n, std::mt19937_64& rng);

// Tau-b in O(n log n) (Knight's algorithm).
double empirical_kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace ordcop
