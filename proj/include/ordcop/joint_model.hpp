#pragma once

// d-variate model: an MVN or MVT copula joins the per-series conditional
// (on the previous wave) distributions. Each joint pmf is a rectangle
// probability whose limits are link-copula quantiles of the series cdf bounds.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ordcop/markov_series.hpp"
#include "ordcop/panel.hpp"
#include "ordcop/rect_prob.hpp"

namespace ordcop {

enum class LinkKind { MVN, MVT };

struct LinkCopula {
  LinkKind kind = LinkKind::MVN;
  double nu = 0.0;

  static LinkCopula mvn() { return {LinkKind::MVN, 0.0}; }
  static LinkCopula mvt(double nu) { return {LinkKind::MVT, nu}; }

  std::string name() const;
  // Univariate quantile of the copula margin (normal, or Student t with nu df).
  double quantile(double u) const;

  bool operator==(const LinkCopula&) const = default;
};

// "mvn", "mvt5", "mvt(5)", "mvt:5"
LinkCopula parse_link_copula(const std::string& s);

struct JointParams {
  std::vector<SeriesModel> series;
  CorrelationMatrix R = CorrelationMatrix::identity(2);
  LinkCopula link;

  int d() const { return static_cast<int>(series.size()); }
};

void validate(const JointParams& jp);

RectProbability joint_pmf_initial(const JointParams& jp, const std::vector<int>& y,
                                  const std::vector<Eigen::VectorXd>& x, const QmcConfig& cfg);

RectProbability joint_pmf_transition(const JointParams& jp, const std::vector<int>& y_t,
                                     const std::vector<int>& y_prev, const std::vector<Eigen::VectorXd>& x_t,
                                     const std::vector<Eigen::VectorXd>& x_prev, const QmcConfig& cfg);

// Integration order for every joint term of a panel: order[subject][record].
// Frozen at reference parameters so that the simulated log-likelihood is a
// smooth function of the parameters (see mvn_rect).
struct OrderingPlan {
  std::vector<std::vector<std::vector<int>>> order;
};

OrderingPlan make_ordering_plan(const JointParams& jp, const OrdinalPanel& panel, int threads = 1);

// Sum over subjects of the initial joint term plus joint transition terms. A
// record with any missing response is dropped; the chain restarts after it and
// after any time gap. std_error combines the per-term QMC errors (delta method).
// Without a plan each term uses the adaptive order at the current parameters.
LogLik joint_loglik(const JointParams& jp, const OrdinalPanel& panel, const QmcConfig& cfg, int threads = 1,
                    const OrderingPlan* plan = nullptr);

}  // namespace ordcop
