#include "ordcop/marginal_ordinal.hpp"

#include <cmath>

#include "ordcop/errors.hpp"
#include "ordcop/special.hpp"

namespace ordcop {

std::string link_name(Link l) { return l == Link::Probit ? "probit" : "logit"; }

Link parse_link(const std::string& s) {
  if (s == "probit") return Link::Probit;
  if (s == "logit") return Link::Logit;
  throw DomainError("unknown link '" + s + "' (expected probit or logit)");
}

double link_cdf(Link l, double x) { return l == Link::Probit ? norm_cdf(x) : logistic_cdf(x); }

double link_quantile(Link l, double p) {
  return l == Link::Probit ? norm_quantile(p) : logistic_quantile(p);
}

void validate(const MarginalParams& par) {
  if (par.cutpoints.size() < 1) throw DomainError("marginal: need at least one cutpoint (K >= 2)");
  if (!par.cutpoints.allFinite() || !par.beta.allFinite())
    throw DomainError("marginal: parameters must be finite");
  for (Eigen::Index k = 1; k < par.cutpoints.size(); ++k)
    if (!(par.cutpoints(k) > par.cutpoints(k - 1)))
      throw DomainError("marginal: cutpoints must be strictly increasing");
}

double eta_of(const MarginalParams& par, const Eigen::VectorXd& x) {
  if (x.size() != par.beta.size()) throw DomainError("marginal: covariate length does not match beta");
  return par.beta.size() == 0 ? 0.0 : x.dot(par.beta);
}

namespace {

double cdf_at(const MarginalParams& par, int y, double eta) {
  if (y <= 0) return 0.0;
  if (y >= par.K()) return 1.0;
  return link_cdf(par.link, par.cutpoints(y - 1) + eta);
}

}  // namespace

double ordinal_cdf(const MarginalParams& par, int y, const Eigen::VectorXd& x) {
  validate(par);
  if (y < 0 || y > par.K()) throw DomainError("ordinal_cdf: category out of range");
  return cdf_at(par, y, eta_of(par, x));
}

double ordinal_pmf(const MarginalParams& par, int y, const Eigen::VectorXd& x) {
  validate(par);
  if (y < 1 || y > par.K()) throw DomainError("ordinal_pmf: category out of range");
  return ordinal_prob(par, y, eta_of(par, x));
}

CdfPair ordinal_bounds(const MarginalParams& par, int y, double eta) {
  return {cdf_at(par, y - 1, eta), cdf_at(par, y, eta)};
}

double ordinal_prob(const MarginalParams& par, int y, double eta) {
  if (par.link == Link::Probit) {
    const double lo = y <= 1 ? -kInf : par.cutpoints(y - 2) + eta;
    const double hi = y >= par.K() ? kInf : par.cutpoints(y - 1) + eta;
    return std::max(0.0, norm_interval(lo, hi));
  }
  const CdfPair b = ordinal_bounds(par, y, eta);
  return std::max(0.0, b.hi - b.lo);
}

void LogLik::require_finite() const {
  if (underflows > 0 && first_underflow)
    throw ZeroProbabilityError(first_underflow->subject, first_underflow->record, first_underflow->response);
}

double floored_log(double p, LogLik& ll, const ObsIndex& at) {
  if (!(p >= kProbabilityFloor)) {
    if (ll.underflows++ == 0) ll.first_underflow = at;
    return std::log(kProbabilityFloor);
  }
  return std::log(p);
}

LogLik loglik_independent(const MarginalParams& par, const OrdinalPanel& panel, int j) {
  validate(par);
  LogLik ll;
  ll.subject_terms.assign(panel.n(), 0.0);
  for (std::size_t i = 0; i < panel.n(); ++i) {
    const auto& s = panel.subjects[i];
    double acc = 0.0;
    for (std::size_t r = 0; r < s.records.size(); ++r) {
      const auto& rec = s.records[r];
      const int y = rec.y[j];
      if (y == kMissing) continue;
      acc += floored_log(ordinal_prob(par, y, eta_of(par, rec.x[j])), ll, {i, r, static_cast<std::size_t>(j)});
    }
    ll.subject_terms[i] = acc;
  }
  for (double t : ll.subject_terms) ll.value += t;
  return ll;
}

}  // namespace ordcop
