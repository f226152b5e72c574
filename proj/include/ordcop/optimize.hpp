#pragma once

// BFGS ascent with central-difference gradients.

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace ordcop {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimizerOptions {
  double tol = 1e-5;        // gradient infinity-norm
  int max_iter = 500;
  double step_rel = 1e-5;   // h = max(step_min, step_rel * |x_k|)
  double step_min = 1e-5;
};

struct OptimResult {
  Eigen::VectorXd argmax;
  double value = 0.0;
  Eigen::MatrixXd inv_hessian;  // approximation to (-Hessian)^{-1}
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double grad_norm = 0.0;
  std::string message;
};

// Central differences. Falls back to a one-sided difference when one side is
// not finite, and to zero when neither is. If curvature is non-null it receives
// the diagonal second differences from the same evaluations.
Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x, double fx,
                                 const OptimizerOptions& opt, Eigen::VectorXd* curvature = nullptr,
                                 int* evaluations = nullptr);

// Maximizes f from init. The search never accepts a point with a lower value,
// so result.value >= f(init). Throws NumericalError if f(init) is not finite.
OptimResult quasi_newton_max(const Objective& f, const Eigen::VectorXd& init, const OptimizerOptions& opt = {},
                             const Eigen::MatrixXd* init_inv_hessian = nullptr);

}  // namespace ordcop
