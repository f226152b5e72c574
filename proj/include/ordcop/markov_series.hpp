#pragma once

// First-order copula Markov chain for one ordinal series. Consecutive marginal
// cdf values (F(y_{t-1}), F(y_t)) are joined by the temporal copula C(u_prev, u_t).

#include <Eigen/Dense>

#include "ordcop/copula_bivariate.hpp"
#include "ordcop/marginal_ordinal.hpp"
#include "ordcop/panel.hpp"

namespace ordcop {

struct SeriesModel {
  MarginalParams marginal;
  BivCopulaSpec temporal;
};

void validate(const SeriesModel& m);

// P(Y_t <= y_t | Y_{t-1} = y_prev). Throws NullConditioningError when the
// conditioning category has probability zero.
double transition_cdf(const SeriesModel& m, int y_t, int y_prev, const Eigen::VectorXd& x_t,
                      const Eigen::VectorXd& x_prev);

double transition_pmf(const SeriesModel& m, int y_t, int y_prev, const Eigen::VectorXd& x_t,
                      const Eigen::VectorXd& x_prev);

// Conditional cdf bounds [P(Y_t <= y_t - 1 | .), P(Y_t <= y_t | .)] from the
// marginal bounds of the previous and current categories. No validation.
CdfPair transition_bounds(const BivCopulaSpec& c, const CdfPair& prev, const CdfPair& cur);

// Sum over subjects of log f(y_1) + sum_t log f(y_t | y_{t-1}). A time gap or a
// missing value restarts the chain with the marginal pmf.
LogLik series_loglik(const SeriesModel& m, const OrdinalPanel& panel, int j);

}  // namespace ordcop
