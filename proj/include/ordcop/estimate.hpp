#pragma once

// Three-step estimation. Step 1 fits each series on its own: (a) margins under
// independence, (b) the temporal copula parameter with margins held fixed,
// (c) both jointly. Step 2 fits the link-copula correlation matrix with every
// series parameter fixed (the two-step IFM estimator). Step 3 refits all
// parameters jointly and is intended for small d.

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ordcop/joint_model.hpp"
#include "ordcop/markov_series.hpp"
#include "ordcop/optimize.hpp"
#include "ordcop/panel.hpp"

namespace ordcop {

struct FitOptions {
  OptimizerOptions optimizer;
  int max_free_params = 60;   // step-3 guard
  bool force_step3 = false;
  bool compute_se = true;
  int threads = 1;
};

// Estimates on the reporting scale with their standard errors. se is empty when
// the Hessian was unusable; se_error then says why.
struct Estimates {
  std::vector<std::string> names;
  Eigen::VectorXd value;
  Eigen::VectorXd se;
  std::string se_error;
  std::vector<double> hessian_eigenvalues;
};

struct SeriesFit {
  int response = 0;
  SeriesModel model;
  double loglik_a = 0.0;
  double loglik_b = 0.0;
  double loglik_c = 0.0;
  std::vector<std::pair<double, double>> nu_profile;  // (nu, step-1c loglik), BVT only
  Eigen::VectorXd free;
  Estimates estimates;
  double tau = 0.0;
  double tau_se = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<int> empty_categories;
  std::vector<double> subject_terms;

  double loglik() const { return loglik_c; }
};

// Starting marginal parameters: zero slopes, cutpoints at the link quantiles of
// the cumulative category proportions.
MarginalParams initial_marginal(const OrdinalPanel& panel, int j, Link link);

// Runs 1(a)-(c) for response j. For BVT the steps are repeated for every nu in
// nu_grid and the largest 1(c) log-likelihood wins.
SeriesFit fit_step1(const OrdinalPanel& panel, int j, const BivCopulaFamily& family, Link link,
                    const std::vector<double>& nu_grid, const FitOptions& opt);

struct JointFit {
  std::string stage;
  JointParams params;
  double loglik = 0.0;
  double loglik_std_error = 0.0;
  double loglik_identity = 0.0;   // at R = I with the same series parameters
  double loglik_start = 0.0;      // at the starting point of the optimization
  Eigen::VectorXd free;
  Estimates estimates;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> subject_terms;
  // Integration order frozen at the step-1 estimates with R = I; step 3 reuses
  // it so both stages maximize the same smooth function.
  std::shared_ptr<const OrderingPlan> plan;
};

JointParams assemble(const std::vector<SeriesFit>& step1, const LinkCopula& link);

// Maximizes joint_loglik over R only.
JointFit fit_step2(const OrdinalPanel& panel, const std::vector<SeriesFit>& step1, const LinkCopula& link,
                   const QmcConfig& cfg, const FitOptions& opt);

std::vector<JointFit> fit_step2(const OrdinalPanel& panel, const std::vector<SeriesFit>& step1,
                                const std::vector<LinkCopula>& links, const QmcConfig& cfg, const FitOptions& opt);

// Full joint maximization from a step-2 result. Throws DomainError when the
// number of free parameters exceeds opt.max_free_params and force_step3 is off.
JointFit fit_step3(const OrdinalPanel& panel, const JointFit& step2, const QmcConfig& cfg, const FitOptions& opt);

// Reporting names "rho[a,b]" for the upper triangle of R.
std::vector<std::string> corr_names(const OrdinalPanel& panel);

}  // namespace ordcop
