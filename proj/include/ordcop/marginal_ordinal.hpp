#pragma once

// Cumulative-link ordinal regression. The cdf at category y is F(alpha_y + x'beta)
// with alpha_0 = -inf, alpha_K = +inf: a positive beta moves probability mass
// towards the LOWER categories as x increases.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ordcop/panel.hpp"

namespace ordcop {

enum class Link { Probit, Logit };

std::string link_name(Link l);
Link parse_link(const std::string& s);

double link_cdf(Link l, double x);
double link_quantile(Link l, double p);

struct MarginalParams {
  Eigen::VectorXd beta;
  Eigen::VectorXd cutpoints;  // K - 1 strictly increasing values
  Link link = Link::Probit;

  int K() const { return static_cast<int>(cutpoints.size()) + 1; }
};

// Throws DomainError on non-increasing or non-finite cutpoints.
void validate(const MarginalParams& par);

// F(alpha_y + x'beta); 0 at y = 0 and 1 at y = K.
double ordinal_cdf(const MarginalParams& par, int y, const Eigen::VectorXd& x);
double ordinal_pmf(const MarginalParams& par, int y, const Eigen::VectorXd& x);

// Both bounds (F(y - 1), F(y)) in one pass; no validation.
struct CdfPair {
  double lo = 0.0;
  double hi = 1.0;
};
CdfPair ordinal_bounds(const MarginalParams& par, int y, double eta);

// Category probability at linear predictor eta, computed without cancellation
// in either tail for the probit link. No validation.
double ordinal_prob(const MarginalParams& par, int y, double eta);

// x'beta; throws DomainError on a length mismatch.
double eta_of(const MarginalParams& par, const Eigen::VectorXd& x);

inline constexpr double kProbabilityFloor = 1e-300;

struct ObsIndex {
  std::size_t subject = 0;
  std::size_t record = 0;
  std::size_t response = 0;
};

// Log-likelihood with floored logs. underflows counts terms whose probability fell
// below kProbabilityFloor; subject_terms holds each subject's contribution.
struct LogLik {
  double value = 0.0;
  std::size_t underflows = 0;
  std::optional<ObsIndex> first_underflow;
  std::vector<double> subject_terms;
  double std_error = 0.0;  // simulation error of value, zero for exact evaluations

  // Throws ZeroProbabilityError if any term underflowed.
  void require_finite() const;
};

// Adds log(max(p, floor)) to acc and records an underflow.
double floored_log(double p, LogLik& ll, const ObsIndex& at);

LogLik loglik_independent(const MarginalParams& par, const OrdinalPanel& panel, int j);

}  // namespace ordcop
