#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ordcop/optimize.hpp"

namespace ordcop {

using ReportingMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct SeResult {
  Eigen::VectorXd estimate;   // reporting scale
  Eigen::VectorXd se;         // reporting scale
  Eigen::MatrixXd cov;        // reporting scale
  Eigen::MatrixXd hessian;    // free scale
};

// Central-difference Hessian with steps rel_step * max(1, |x_i|).
Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x, double rel_step = 1e-4);

// Jacobian of a vector map by central differences.
Eigen::MatrixXd numerical_jacobian(const ReportingMap& g, const Eigen::VectorXd& x, double rel_step = 1e-6);

// SEs from the inverse negative Hessian of f at argmax, pushed through the
// reporting map by the delta method (identity map when `report` is empty).
// Throws HessianNotNegativeDefinite carrying the eigenvalues of -H.
SeResult hessian_se(const Objective& f, const Eigen::VectorXd& argmax, const ReportingMap& report = {},
                    double rel_step = 1e-4);

struct WaldResult {
  double z = 0.0;
  double p_value = 1.0;
};

WaldResult wald_test(double estimate, double se);

// Two-sided standard normal tail probability.
double normal_two_sided_p(double z);

struct VuongResult {
  double z0 = 0.0;
  double p_value = 1.0;
  double d_bar = 0.0;
  double s = 0.0;
  std::size_t N = 0;
};

// D_i = model2_i - model1_i; positive z0 favours model 2.
VuongResult vuong_test(std::span<const double> model1, std::span<const double> model2);

struct JackknifeResult {
  Eigen::VectorXd se;
  Eigen::VectorXd mean;       // mean of the leave-one-out estimates
  std::size_t used = 0;
  std::size_t dropped = 0;
  std::vector<std::string> failures;
};

using SubsetEstimator = std::function<Eigen::VectorXd(const std::vector<std::size_t>& keep)>;

// Delete-one jackknife over n units. A replicate that throws is dropped and
// disclosed; SE = sqrt((m - 1) / m * sum (theta_i - mean)^2) over the m kept.
JackknifeResult jackknife_se(std::size_t n, const SubsetEstimator& estimator, std::size_t min_n = 30,
                             int threads = 1);

}  // namespace ordcop
