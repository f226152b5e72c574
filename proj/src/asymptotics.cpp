#include "ordcop/asymptotics.hpp"

#include <chrono>
#include <cmath>

#include "ordcop/errors.hpp"
#include "ordcop/parallel.hpp"
#include "ordcop/special.hpp"
#include "ordcop/transforms.hpp"

namespace ordcop {

namespace {

constexpr double kExactTol = 1e-13;

double latent_limit(Link link, double v) {
  return link == Link::Probit ? v : norm_quantile(logistic_cdf(v));
}

Rectangle case_rectangle(const AsymParams& par, Link link, const std::vector<int>& y, double x) {
  const int d = static_cast<int>(y.size());
  const int K = static_cast<int>(par.cutpoints.size()) + 1;
  Rectangle r{Eigen::VectorXd(d), Eigen::VectorXd(d)};
  const double eta = x * par.beta;
  for (int j = 0; j < d; ++j) {
    r.lower(j) = y[j] == 1 ? -kInf : latent_limit(link, par.cutpoints(y[j] - 2) + eta);
    r.upper(j) = y[j] == K ? kInf : latent_limit(link, par.cutpoints(y[j] - 1) + eta);
  }
  return r;
}

double exact_probability(const AsymParams& par, const Rectangle& r) {
  if (par.rho == 0.0) {
    double p = 1.0;
    for (Eigen::Index j = 0; j < r.dim(); ++j) p *= norm_interval(r.lower(j), r.upper(j));
    return p;
  }
  return mvn_rect_exchangeable(r, par.rho, kExactTol);
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

std::size_t full_case_count(int d, int K, const CovariateSupport& support) {
  double c = std::pow(static_cast<double>(K), d) * static_cast<double>(support.values.size());
  return c > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(c);
}

CaseTable enumerate_cases(const AsymParams& truth, int d, int K, const CovariateSupport& support, Link link,
                          std::size_t max_cases) {
  if (d < 1 || K < 2) throw DomainError("enumerate_cases: need d >= 1 and K >= 2");
  if (truth.cutpoints.size() != K - 1) throw DomainError("enumerate_cases: cutpoint count does not match K");
  if (!(truth.rho >= 0.0 && truth.rho < 1.0)) throw DomainError("enumerate_cases: rho must lie in [0, 1)");
  if (support.values.size() != support.mass.size() || support.values.empty())
    throw DomainError("enumerate_cases: covariate support and mass differ in length");
  double msum = 0.0;
  for (double m : support.mass) {
    if (m < 0.0) throw DomainError("enumerate_cases: negative covariate mass");
    msum += m;
  }
  if (std::abs(msum - 1.0) > 1e-12) throw DomainError("enumerate_cases: covariate mass must sum to 1");
  if (full_case_count(d, K, support) > max_cases)
    throw DomainError("enumerate_cases: " + std::to_string(full_case_count(d, K, support)) +
                      " cases exceed the cap of " + std::to_string(max_cases));

  CaseTable table;
  table.d = d;
  table.K = K;
  table.link = link;
  // Non-decreasing patterns, counted with their number of distinct permutations.
  std::vector<int> y(d, 1);
  std::vector<std::vector<int>> patterns;
  std::vector<std::size_t> mult;
  while (true) {
    patterns.push_back(y);
    std::vector<int> count(K + 1, 0);
    for (int v : y) ++count[v];
    double lm = log_factorial(d);
    for (int c : count) lm -= log_factorial(c);
    mult.push_back(static_cast<std::size_t>(std::llround(std::exp(lm))));
    int pos = d - 1;
    while (pos >= 0 && y[pos] == K) --pos;
    if (pos < 0) break;
    const int v = y[pos] + 1;
    for (int k = pos; k < d; ++k) y[k] = v;
  }
  for (std::size_t s = 0; s < support.values.size(); ++s) {
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      table.y.push_back(patterns[p]);
      table.x.push_back(support.values[s]);
      table.multiplicity.push_back(mult[p]);
      const double h = exact_probability(truth, case_rectangle(truth, link, patterns[p], support.values[s]));
      table.weights.push_back(support.mass[s] * static_cast<double>(mult[p]) * h);
    }
  }
  return table;
}

double case_probability(const AsymParams& par, const CaseTable& table, std::size_t t, Evaluator ev,
                        const QmcConfig& cfg, double* std_error) {
  const Rectangle r = case_rectangle(par, table.link, table.y[t], table.x[t]);
  if (ev == Evaluator::Exact1D) {
    if (std_error) *std_error = 0.0;
    return exact_probability(par, r);
  }
  const RectProbability p = mvn_rect(r, CorrelationMatrix::exchangeable(table.d, par.rho), cfg);
  if (std_error) *std_error = p.std_error;
  return p.value;
}

LimitValue limit_loglik(const AsymParams& par, const CaseTable& table, Evaluator ev, const QmcConfig& cfg,
                        int threads) {
  if (par.cutpoints.size() != table.K - 1) throw DomainError("limit_loglik: cutpoint count does not match K");
  for (Eigen::Index k = 1; k < par.cutpoints.size(); ++k)
    if (!(par.cutpoints(k) > par.cutpoints(k - 1))) throw DomainError("limit_loglik: cutpoints must increase");
  if (!(par.rho >= 0.0 && par.rho < 1.0)) throw DomainError("limit_loglik: rho must lie in [0, 1)");
  std::vector<double> h(table.size());
  parallel_for(table.size(), threads, [&](std::size_t t) { h[t] = case_probability(par, table, t, ev, cfg); });
  LimitValue out;
  for (std::size_t t = 0; t < table.size(); ++t) {
    if (table.weights[t] == 0.0) continue;
    if (!(h[t] >= kProbabilityFloor)) {
      ++out.zero_cells;
      out.value += table.weights[t] * std::log(kProbabilityFloor);
    } else {
      out.value += table.weights[t] * std::log(h[t]);
    }
  }
  return out;
}

Eigen::VectorXd asym_to_free(const AsymParams& p, bool fix_rho) {
  const auto c = p.cutpoints.size();
  Eigen::VectorXd x(1 + c + (fix_rho ? 0 : 1));
  x(0) = p.beta;
  x.segment(1, c) = cutpoints_to_free(p.cutpoints);
  if (!fix_rho) x(1 + c) = std::log(p.rho) - std::log1p(-p.rho);
  return x;
}

AsymParams asym_from_free(const Eigen::VectorXd& x, int K, bool fix_rho, double fixed_rho) {
  AsymParams p;
  p.beta = x(0);
  p.cutpoints = cutpoints_from_free(x.segment(1, K - 1));
  p.rho = fix_rho ? fixed_rho : 1.0 / (1.0 + std::exp(-x(K)));
  return p;
}

LimitEstimate limiting_estimates(const CaseTable& table, Evaluator ev, const AsymParams& init, const QmcConfig& cfg,
                                 const LimitOptions& opt, const Eigen::MatrixXd* init_inv_hessian) {
  const int K = table.K;
  auto obj = [&](const Eigen::VectorXd& x) {
    try {
      return limit_loglik(asym_from_free(x, K, opt.fix_rho, init.rho), table, ev, cfg, opt.threads).value;
    } catch (const std::exception&) {
      return -kInf;
    }
  };
  const OptimResult r = quasi_newton_max(obj, asym_to_free(init, opt.fix_rho), opt.optimizer, init_inv_hessian);
  LimitEstimate e;
  e.free = r.argmax;
  e.params = asym_from_free(r.argmax, K, opt.fix_rho, init.rho);
  e.value = r.value;
  e.inv_hessian = r.inv_hessian;
  e.converged = r.converged;
  e.iterations = r.iterations;
  e.grad_norm = r.grad_norm;
  return e;
}

Eigen::VectorXd default_cutpoints(int K) {
  if (K == 2) return Eigen::VectorXd::Constant(1, 0.2);
  if (K == 3) return (Eigen::VectorXd(2) << -0.6, 0.4).finished();
  return Eigen::VectorXd::LinSpaced(K - 1, -1.0, 1.0);
}

std::vector<AsymDesign> default_asymptotic_grid() {
  std::vector<AsymDesign> g;
  for (int d : {3, 5})
    for (int K : {2, 3})
      for (double rho : {0.3, 0.6}) g.push_back({d, K, rho, 0.5, default_cutpoints(K)});
  return g;
}

AsymRow run_asymptotic_design(const AsymDesign& design, const QmcConfig& cfg, const LimitOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  AsymRow row;
  row.design = design;
  const AsymParams truth{design.beta, design.cutpoints, design.rho};
  const CaseTable table = enumerate_cases(truth, design.d, design.K, CovariateSupport{});
  row.cases = table.size();
  AsymParams start = truth;
  start.beta += 0.1;
  start.cutpoints.array() -= 0.1;
  if (!opt.fix_rho) start.rho = 0.8 * truth.rho;
  LimitOptions o = opt;
  o.fix_rho = opt.fix_rho || design.rho == 0.0;
  if (o.fix_rho) start.rho = truth.rho;
  row.mle = limiting_estimates(table, Evaluator::Exact1D, start, cfg, o);
  row.msle = limiting_estimates(table, Evaluator::QMC, row.mle.params, cfg, o, &row.mle.inv_hessian);
  row.max_gap = std::abs(row.mle.params.beta - row.msle.params.beta);
  row.max_gap = std::max(row.max_gap, (row.mle.params.cutpoints - row.msle.params.cutpoints).cwiseAbs().maxCoeff());
  row.max_gap = std::max(row.max_gap, std::abs(row.mle.params.rho - row.msle.params.rho));
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace ordcop
