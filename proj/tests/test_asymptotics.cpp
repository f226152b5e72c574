#include <doctest.h>

#include <cmath>
#include <random>

#include "ordcop/asymptotics.hpp"
#include "ordcop/errors.hpp"
#include "ordcop/special.hpp"
#include "oracle_values.hpp"

using namespace ordcop;
using doctest::Approx;

namespace {

AsymParams params(double beta, std::vector<double> cut, double rho) {
  AsymParams p;
  p.beta = beta;
  p.cutpoints = Eigen::Map<Eigen::VectorXd>(cut.data(), static_cast<Eigen::Index>(cut.size()));
  p.rho = rho;
  return p;
}

double weight_sum(const CaseTable& t) {
  double s = 0;
  for (double w : t.weights) s += w;
  return s;
}

}  // namespace

TEST_CASE("case enumeration") {
  const CovariateSupport one{{0.0}, {1.0}};
  const auto t = enumerate_cases(params(0.5, {0.2}, 0.3), 2, 2, one);
  CHECK(full_case_count(2, 2, one) == 4);
  std::size_t covered = 0;
  for (auto m : t.multiplicity) covered += m;
  CHECK(covered == 4);
  CHECK(std::abs(weight_sum(t) - 1.0) < 1e-12);

  const CovariateSupport two;
  const auto t5 = enumerate_cases(params(0.5, {-0.6, 0.4}, 0.6), 5, 3, two);
  covered = 0;
  for (auto m : t5.multiplicity) covered += m;
  CHECK(covered == full_case_count(5, 3, two));
  CHECK(std::abs(weight_sum(t5) - 1.0) < 1e-12);
  for (double w : t5.weights) CHECK(w >= 0.0);

  CHECK_THROWS_AS(enumerate_cases(params(0.5, {0.2}, 0.3), 12, 4, two), DomainError);
}

TEST_CASE("rho = 0 gives products of marginal pmfs") {
  const CovariateSupport one{{1.0}, {1.0}};
  const auto par = params(0.5, {-0.6, 0.4}, 0.0);
  const auto t = enumerate_cases(par, 3, 3, one);
  const MarginalParams m{Eigen::VectorXd::Constant(1, 0.5), par.cutpoints, Link::Probit};
  for (std::size_t c = 0; c < t.size(); ++c) {
    double prod = 1;
    for (int y : t.y[c]) prod *= ordinal_prob(m, y, 0.5);
    CHECK(t.weights[c] == Approx(prod * t.multiplicity[c]).epsilon(1e-12));
  }
}

TEST_CASE("orthant cell against the quadrature reference") {
  const CovariateSupport one{{0.0}, {1.0}};
  const auto t = enumerate_cases(params(0.0, {-1.0, 1.0}, 0.5), 3, 3, one);
  bool found = false;
  for (std::size_t c = 0; c < t.size(); ++c)
    if (t.y[c] == std::vector<int>{1, 1, 1}) {
      found = true;
      CHECK(t.multiplicity[c] == 1);
      CHECK(std::abs(t.weights[c] - oracle::kExch3Cell111) < 1e-12);
    }
  CHECK(found);
}

TEST_CASE("limit log-likelihood: Gibbs identity, cross-evaluator, KL inequality") {
  const CovariateSupport sup;
  const auto truth = params(0.5, {-0.6, 0.4}, 0.3);
  const auto t = enumerate_cases(truth, 3, 3, sup);
  const QmcConfig cfg;
  double neg_entropy = 0;
  for (std::size_t c = 0; c < t.size(); ++c)
    neg_entropy += t.weights[c] * std::log(t.weights[c] / t.multiplicity[c] /
                                           (sup.mass[t.x[c] == sup.values[0] ? 0 : 1]));
  const double exact = limit_loglik(truth, t, Evaluator::Exact1D, cfg).value;
  CHECK(exact == Approx(neg_entropy).epsilon(1e-10));

  double qmc = 0, var = 0;
  for (std::size_t c = 0; c < t.size(); ++c) {
    double se = 0;
    const double h = case_probability(truth, t, c, Evaluator::QMC, cfg, &se);
    qmc += t.weights[c] * std::log(h);
    var += std::pow(t.weights[c] * se / h, 2);
  }
  CHECK(qmc == limit_loglik(truth, t, Evaluator::QMC, cfg).value);
  CHECK(std::abs(qmc - exact) <= 3 * std::sqrt(var));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> N(0, 0.1);
  for (int k = 0; k < 20; ++k) {
    AsymParams p = truth;
    p.beta += N(rng);
    p.cutpoints(0) += N(rng);
    p.cutpoints(1) += N(rng);
    p.rho = std::clamp(p.rho + N(rng), 0.01, 0.9);
    CHECK(limit_loglik(p, t, Evaluator::Exact1D, cfg).value < exact);
  }
}

TEST_CASE("limiting MLE recovers the truth; rho = 0 reproduces the probit MLE") {
  const CovariateSupport sup;
  const auto truth = params(0.5, {0.2}, 0.3);
  const auto t = enumerate_cases(truth, 3, 2, sup);
  const QmcConfig cfg;
  const auto est = limiting_estimates(t, Evaluator::Exact1D, params(0.3, {0.0}, 0.5), cfg);
  CHECK(est.converged);
  CHECK(std::abs(est.params.beta - 0.5) < 1e-6);
  CHECK(std::abs(est.params.cutpoints(0) - 0.2) < 1e-6);
  CHECK(std::abs(est.params.rho - 0.3) < 1e-6);

  const auto t0 = enumerate_cases(params(0.5, {-0.6, 0.4}, 0.0), 3, 3, sup);
  LimitOptions fixed;
  fixed.fix_rho = true;
  const auto e0 = limiting_estimates(t0, Evaluator::Exact1D, params(0.2, {-0.3, 0.6}, 0.0), cfg, fixed);
  CHECK(std::abs(e0.params.beta - 0.5) < 1e-6);
  CHECK(std::abs(e0.params.cutpoints(0) + 0.6) < 1e-6);
  CHECK(std::abs(e0.params.cutpoints(1) - 0.4) < 1e-6);
  CHECK(e0.params.rho == 0.0);
}

TEST_CASE("MSLE-MLE gap does not grow with the QMC budget (d = 3 designs)") {
  QmcConfig lo, hi;
  lo.points_per_shift = 512;
  hi.points_per_shift = 1024;
  double gap_lo = 0, gap_hi = 0;
  for (const auto& d : default_asymptotic_grid()) {
    if (d.d != 3) continue;
    gap_lo = std::max(gap_lo, run_asymptotic_design(d, lo).max_gap);
    gap_hi = std::max(gap_hi, run_asymptotic_design(d, hi).max_gap);
  }
  MESSAGE("max gap at 512 points: " << gap_lo << ", at 1024 points: " << gap_hi);
  CHECK(gap_hi <= gap_lo);
}
