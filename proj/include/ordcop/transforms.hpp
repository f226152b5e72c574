#pragma once

// Maps between constrained model parameters and unconstrained vectors.
//   cutpoints     <-> (alpha_1, log increments)
//   Frank theta   <-> identity
//   Gumbel theta  <-> 1 + softplus(x), capped at kGumbelThetaCap
//   BVN/BVT theta <-> Fisher z
//   correlation R <-> Cholesky spherical angles, angle = pi * logistic(x)

#include <Eigen/Dense>

#include "ordcop/copula_bivariate.hpp"
#include "ordcop/markov_series.hpp"

namespace ordcop {

inline constexpr double kGumbelThetaCap = 50.0;

Eigen::VectorXd cutpoints_to_free(const Eigen::VectorXd& cut);
Eigen::VectorXd cutpoints_from_free(const Eigen::VectorXd& free);

// Number of free temporal parameters: 0 for Independence, otherwise 1.
int theta_free_size(const BivCopulaFamily& f);
double theta_to_free(const BivCopulaFamily& f, double theta);
double theta_from_free(const BivCopulaFamily& f, double x);

int corr_free_size(int d);
Eigen::VectorXd corr_to_free(const Eigen::MatrixXd& R);
Eigen::MatrixXd corr_from_free(const Eigen::VectorXd& free, int d);

// Series model packing: [beta, cutpoint free values, theta free value (if any)].
int series_free_size(const SeriesModel& m);
Eigen::VectorXd series_to_free(const SeriesModel& m);
// Family, link and dimensions are taken from `like`.
SeriesModel series_from_free(const SeriesModel& like, const Eigen::VectorXd& free);

// Reporting scale of a series model: [beta, cutpoints, theta (if any)].
Eigen::VectorXd series_reporting(const SeriesModel& m);

// Upper-triangle entries of R, row-major.
Eigen::VectorXd corr_offdiag(const Eigen::MatrixXd& R);

}  // namespace ordcop
