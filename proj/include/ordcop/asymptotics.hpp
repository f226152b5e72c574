#pragma once

// Population-limit comparison of the simulated-likelihood estimator with the
// exact MLE. The model is an exchangeable MVN copula over d ordinal margins that
// share (beta, cutpoints); x is a discrete covariate. The limiting objective is
// sum_t p_t log h(y_t | x_t; params), with p_t the true case probabilities.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "ordcop/marginal_ordinal.hpp"
#include "ordcop/optimize.hpp"
#include "ordcop/rect_prob.hpp"

namespace ordcop {

struct AsymParams {
  double beta = 0.0;
  Eigen::VectorXd cutpoints;
  double rho = 0.0;  // in [0, 1)
};

struct CovariateSupport {
  std::vector<double> values{0.0, 1.0};
  std::vector<double> mass{0.5, 0.5};
};

struct CaseTable {
  int d = 0;
  int K = 0;
  Link link = Link::Probit;
  // Response patterns are stored sorted: permuted patterns have equal
  // probability under an exchangeable model, so each row stands for all of its
  // permutations and carries their combined weight.
  std::vector<std::vector<int>> y;
  std::vector<double> x;
  std::vector<double> weights;
  std::vector<std::size_t> multiplicity;

  std::size_t size() const { return weights.size(); }
};

enum class Evaluator { QMC, Exact1D };

// Number of (pattern, covariate) pairs before collapsing permutations.
std::size_t full_case_count(int d, int K, const CovariateSupport& support);

// Throws DomainError when the uncollapsed case count exceeds max_cases.
CaseTable enumerate_cases(const AsymParams& truth, int d, int K, const CovariateSupport& support,
                          Link link = Link::Probit, std::size_t max_cases = 1000000);

// h(y | x) under params.
double case_probability(const AsymParams& par, const CaseTable& table, std::size_t t, Evaluator ev,
                        const QmcConfig& cfg, double* std_error = nullptr);

struct LimitValue {
  double value = 0.0;
  std::size_t zero_cells = 0;
};

LimitValue limit_loglik(const AsymParams& par, const CaseTable& table, Evaluator ev, const QmcConfig& cfg,
                        int threads = 1);

// Free vector: [beta, cutpoint free values, logit(rho)] (rho omitted when fixed).
Eigen::VectorXd asym_to_free(const AsymParams& p, bool fix_rho);
AsymParams asym_from_free(const Eigen::VectorXd& x, int K, bool fix_rho, double fixed_rho = 0.0);

struct LimitEstimate {
  AsymParams params;
  Eigen::VectorXd free;
  double value = 0.0;
  Eigen::MatrixXd inv_hessian;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

struct LimitOptions {
  OptimizerOptions optimizer{1e-9, 500, 1e-5, 1e-5};
  bool fix_rho = false;
  int threads = 1;
};

LimitEstimate limiting_estimates(const CaseTable& table, Evaluator ev, const AsymParams& init, const QmcConfig& cfg,
                                 const LimitOptions& opt = {}, const Eigen::MatrixXd* init_inv_hessian = nullptr);

struct AsymDesign {
  int d = 3;
  int K = 2;
  double rho = 0.3;
  double beta = 0.5;
  Eigen::VectorXd cutpoints;
};

// Default cutpoints: (0.2) for K = 2, (-0.6, 0.4) for K = 3, evenly spread otherwise.
Eigen::VectorXd default_cutpoints(int K);

struct AsymRow {
  AsymDesign design;
  std::size_t cases = 0;
  LimitEstimate mle;
  LimitEstimate msle;
  double max_gap = 0.0;
  double seconds = 0.0;
};

// Limiting MLE (Exact1D) and limiting MSLE (QMC, started from the MLE) per design.
AsymRow run_asymptotic_design(const AsymDesign& design, const QmcConfig& cfg, const LimitOptions& opt = {});

std::vector<AsymDesign> default_asymptotic_grid();

}  // namespace ordcop
