#include "ordcop/joint_model.hpp"

#include <cmath>
#include <span>

#include "ordcop/errors.hpp"
#include "ordcop/parallel.hpp"
#include "ordcop/special.hpp"

namespace ordcop {

std::string LinkCopula::name() const {
  if (kind == LinkKind::MVN) return "mvn";
  std::string s = std::to_string(nu);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return "mvt" + s;
}

double LinkCopula::quantile(double u) const {
  return kind == LinkKind::MVN ? norm_quantile(u) : t_quantile(u, nu);
}

LinkCopula parse_link_copula(const std::string& s) {
  if (s == "mvn" || s == "MVN") return LinkCopula::mvn();
  if (s.size() > 3 && (s.rfind("mvt", 0) == 0 || s.rfind("MVT", 0) == 0)) {
    std::string rest = s.substr(3);
    if (!rest.empty() && (rest.front() == '(' || rest.front() == ':')) rest.erase(0, 1);
    if (!rest.empty() && rest.back() == ')') rest.pop_back();
    std::size_t used = 0;
    double nu = 0.0;
    try {
      nu = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == rest.size() && nu > 0.0) return LinkCopula::mvt(nu);
  }
  throw DomainError("unknown link copula '" + s + "' (expected mvn or mvt<nu>)");
}

void validate(const JointParams& jp) {
  if (jp.d() < 2) throw DomainError("joint model needs d >= 2 series");
  if (jp.R.dim() != jp.d()) throw DomainError("joint model: R dimension does not match number of series");
  if (jp.link.kind == LinkKind::MVT && !(jp.link.nu > 0.0)) throw DomainError("joint model: MVT needs nu > 0");
  for (const auto& m : jp.series) validate(m);
}

namespace {

// False when some interval is empty (probability zero).
bool rect_of(const JointParams& jp, const std::vector<CdfPair>& b, Rectangle& rect) {
  const int d = jp.d();
  rect.lower.resize(d);
  rect.upper.resize(d);
  for (int j = 0; j < d; ++j) {
    if (!(b[j].hi > b[j].lo)) return false;
    rect.lower(j) = jp.link.quantile(b[j].lo);
    rect.upper(j) = jp.link.quantile(b[j].hi);
    if (!(rect.upper(j) > rect.lower(j))) return false;
  }
  return true;
}

RectProbability rect_from_bounds(const JointParams& jp, const std::vector<CdfPair>& b, const QmcConfig& cfg,
                                 std::span<const int> order = {}) {
  Rectangle rect;
  if (!rect_of(jp, b, rect)) return {0.0, 0.0};
  return jp.link.kind == LinkKind::MVN ? mvn_rect(rect, jp.R, cfg, order)
                                       : mvt_rect(rect, jp.R, jp.link.nu, cfg, order);
}

void check_categories(const JointParams& jp, const std::vector<int>& y) {
  if (static_cast<int>(y.size()) != jp.d()) throw DomainError("joint pmf: wrong number of categories");
  for (int j = 0; j < jp.d(); ++j)
    if (y[j] < 1 || y[j] > jp.series[j].marginal.K()) throw DomainError("joint pmf: category out of range");
}

}  // namespace

RectProbability joint_pmf_initial(const JointParams& jp, const std::vector<int>& y,
                                  const std::vector<Eigen::VectorXd>& x, const QmcConfig& cfg) {
  validate(jp);
  check_categories(jp, y);
  std::vector<CdfPair> b(jp.d());
  for (int j = 0; j < jp.d(); ++j)
    b[j] = ordinal_bounds(jp.series[j].marginal, y[j], eta_of(jp.series[j].marginal, x.at(j)));
  return rect_from_bounds(jp, b, cfg);
}

RectProbability joint_pmf_transition(const JointParams& jp, const std::vector<int>& y_t,
                                     const std::vector<int>& y_prev, const std::vector<Eigen::VectorXd>& x_t,
                                     const std::vector<Eigen::VectorXd>& x_prev, const QmcConfig& cfg) {
  validate(jp);
  check_categories(jp, y_t);
  check_categories(jp, y_prev);
  std::vector<CdfPair> b(jp.d());
  for (int j = 0; j < jp.d(); ++j) {
    const auto& m = jp.series[j];
    const CdfPair prev = ordinal_bounds(m.marginal, y_prev[j], eta_of(m.marginal, x_prev.at(j)));
    if (!(prev.hi > prev.lo))
      throw NullConditioningError("joint transition: series " + std::to_string(j) +
                                  " conditions on a zero-probability category");
    const CdfPair cur = ordinal_bounds(m.marginal, y_t[j], eta_of(m.marginal, x_t.at(j)));
    b[j] = transition_bounds(m.temporal, prev, cur);
  }
  return rect_from_bounds(jp, b, cfg);
}

namespace {

bool complete(const Record& r) {
  for (int v : r.y)
    if (v == kMissing) return false;
  return true;
}

struct SubjectTerm {
  double value = 0.0;
  double var = 0.0;
  std::size_t underflows = 0;
  ObsIndex first;
};

// Calls f(r, bounds) for every joint term of subject s, in record order.
template <class F>
void for_each_term(const JointParams& jp, const Subject& s, F&& f) {
  const int d = jp.d();
  std::vector<CdfPair> prev(d), cur(d), b(d);
  bool have_prev = false;
  for (std::size_t r = 0; r < s.records.size(); ++r) {
    const auto& rec = s.records[r];
    if (!complete(rec)) {
      have_prev = false;
      continue;
    }
    bool degenerate_prev = false;
    for (int j = 0; j < d; ++j) {
      const auto& m = jp.series[j].marginal;
      cur[j] = ordinal_bounds(m, rec.y[j], eta_of(m, rec.x[j]));
      degenerate_prev = degenerate_prev || !(prev[j].hi > prev[j].lo);
    }
    const bool transition = have_prev && !degenerate_prev && rec.time == s.records[r - 1].time + 1;
    for (int j = 0; j < d; ++j) b[j] = transition ? transition_bounds(jp.series[j].temporal, prev[j], cur[j]) : cur[j];
    f(r, b);
    prev = cur;
    have_prev = true;
  }
}

SubjectTerm subject_loglik(const JointParams& jp, const Subject& s, std::size_t i, const QmcConfig& cfg,
                           const std::vector<std::vector<int>>* order) {
  SubjectTerm out;
  for_each_term(jp, s, [&](std::size_t r, const std::vector<CdfPair>& b) {
    const RectProbability p = rect_from_bounds(jp, b, cfg, order ? std::span<const int>((*order)[r]) : std::span<const int>());
    if (!(p.value >= kProbabilityFloor)) {
      if (out.underflows++ == 0) out.first = {i, r, 0};
      out.value += std::log(kProbabilityFloor);
    } else {
      out.value += std::log(p.value);
      const double rel = p.std_error / p.value;
      out.var += rel * rel;
    }
  });
  return out;
}

}  // namespace

OrderingPlan make_ordering_plan(const JointParams& jp, const OrdinalPanel& panel, int threads) {
  validate(jp);
  if (panel.d() != jp.d()) throw DomainError("ordering plan: panel and model dimensions differ");
  OrderingPlan plan;
  plan.order.resize(panel.n());
  std::vector<int> natural(jp.d());
  for (int j = 0; j < jp.d(); ++j) natural[j] = j;
  parallel_for(panel.n(), threads, [&](std::size_t i) {
    const Subject& s = panel.subjects[i];
    auto& out = plan.order[i];
    out.assign(s.records.size(), natural);
    for_each_term(jp, s, [&](std::size_t r, const std::vector<CdfPair>& b) {
      Rectangle rect;
      if (!rect_of(jp, b, rect)) return;
      auto o = rect_variable_order(rect, jp.R);
      if (!o.empty()) out[r] = std::move(o);
    });
  });
  return plan;
}

LogLik joint_loglik(const JointParams& jp, const OrdinalPanel& panel, const QmcConfig& cfg, int threads,
                    const OrderingPlan* plan) {
  validate(jp);
  validate(cfg);
  if (panel.d() != jp.d()) throw DomainError("joint_loglik: panel and model dimensions differ");
  if (plan) {
    bool ok = plan->order.size() == panel.n();
    for (std::size_t i = 0; ok && i < panel.n(); ++i) ok = plan->order[i].size() == panel.subjects[i].records.size();
    if (!ok) throw DomainError("joint_loglik: ordering plan does not match the panel");
  }
  std::vector<SubjectTerm> terms(panel.n());
  parallel_for(panel.n(), threads, [&](std::size_t i) {
    terms[i] = subject_loglik(jp, panel.subjects[i], i, cfg, plan ? &plan->order[i] : nullptr);
  });
  LogLik ll;
  ll.subject_terms.resize(panel.n());
  double var = 0.0;
  for (std::size_t i = 0; i < panel.n(); ++i) {
    ll.subject_terms[i] = terms[i].value;
    ll.value += terms[i].value;
    var += terms[i].var;
    if (terms[i].underflows > 0) {
      if (ll.underflows == 0) ll.first_underflow = terms[i].first;
      ll.underflows += terms[i].underflows;
    }
  }
  ll.std_error = std::sqrt(var);
  return ll;
}

}  // namespace ordcop
