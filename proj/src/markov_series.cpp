#include "ordcop/markov_series.hpp"

#include <algorithm>

#include "ordcop/errors.hpp"

namespace ordcop {

void validate(const SeriesModel& m) {
  validate(m.marginal);
  validate(m.temporal);
}

namespace {

void check_category(const SeriesModel& m, int y, int lo) {
  if (y < lo || y > m.marginal.K()) throw DomainError("transition: category out of range");
}

double conditional_cdf(const BivCopulaSpec& c, const CdfPair& prev, double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  const double num = biv_cdf(c, prev.hi, v) - biv_cdf(c, prev.lo, v);
  return std::clamp(num / (prev.hi - prev.lo), 0.0, 1.0);
}

}  // namespace

CdfPair transition_bounds(const BivCopulaSpec& c, const CdfPair& prev, const CdfPair& cur) {
  return {conditional_cdf(c, prev, cur.lo), conditional_cdf(c, prev, cur.hi)};
}

double transition_cdf(const SeriesModel& m, int y_t, int y_prev, const Eigen::VectorXd& x_t,
                      const Eigen::VectorXd& x_prev) {
  validate(m);
  check_category(m, y_t, 0);
  check_category(m, y_prev, 1);
  const CdfPair prev = ordinal_bounds(m.marginal, y_prev, eta_of(m.marginal, x_prev));
  if (!(prev.hi > prev.lo))
    throw NullConditioningError("transition: previous category " + std::to_string(y_prev) +
                                " has probability zero");
  if (y_t == 0) return 0.0;
  if (y_t == m.marginal.K()) return 1.0;
  const CdfPair cur = ordinal_bounds(m.marginal, y_t, eta_of(m.marginal, x_t));
  return conditional_cdf(m.temporal, prev, cur.hi);
}

double transition_pmf(const SeriesModel& m, int y_t, int y_prev, const Eigen::VectorXd& x_t,
                      const Eigen::VectorXd& x_prev) {
  validate(m);
  check_category(m, y_t, 1);
  check_category(m, y_prev, 1);
  const CdfPair prev = ordinal_bounds(m.marginal, y_prev, eta_of(m.marginal, x_prev));
  if (!(prev.hi > prev.lo))
    throw NullConditioningError("transition: previous category " + std::to_string(y_prev) +
                                " has probability zero");
  const CdfPair cur = ordinal_bounds(m.marginal, y_t, eta_of(m.marginal, x_t));
  return biv_pmf_rect(m.temporal, prev.lo, prev.hi, cur.lo, cur.hi) / (prev.hi - prev.lo);
}

LogLik series_loglik(const SeriesModel& m, const OrdinalPanel& panel, int j) {
  validate(m);
  const bool indep = m.temporal.family.tag == Family::Independence;
  LogLik ll;
  ll.subject_terms.assign(panel.n(), 0.0);
  for (std::size_t i = 0; i < panel.n(); ++i) {
    const auto& s = panel.subjects[i];
    double acc = 0.0;
    CdfPair prev;
    for (std::size_t r = 0; r < s.records.size(); ++r) {
      const int y = s.records[r].y[j];
      if (y == kMissing) continue;
      const double eta = eta_of(m.marginal, s.records[r].x[j]);
      const CdfPair cur = ordinal_bounds(m.marginal, y, eta);
      const ObsIndex at{i, r, static_cast<std::size_t>(j)};
      if (indep || !continues_chain(s, r, j) || !(prev.hi > prev.lo)) {
        acc += floored_log(ordinal_prob(m.marginal, y, eta), ll, at);
      } else {
        const double p = biv_pmf_rect(m.temporal, prev.lo, prev.hi, cur.lo, cur.hi) / (prev.hi - prev.lo);
        acc += floored_log(p, ll, at);
      }
      prev = cur;
    }
    ll.subject_terms[i] = acc;
  }
  for (double t : ll.subject_terms) ll.value += t;
  return ll;
}

}  // namespace ordcop
