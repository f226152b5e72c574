#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ordcop/errors.hpp"
#include "ordcop/estimate.hpp"
#include "ordcop/marginal_ordinal.hpp"
#include "ordcop/special.hpp"
#include "oracle_values.hpp"

using namespace ordcop;
using namespace testutil;
using doctest::Approx;

namespace {

// K = 2 panel with one binary covariate: x = 0 has n0_low of 100 in category 1,
// x = 1 has n1_low of 100.
OrdinalPanel two_by_two(int n0_low, int n1_low) {
  OrdinalPanel p;
  p.responses = {"y"};
  p.K = {2};
  p.covariates = {"x"};
  p.series_columns = {{0}};
  int id = 0;
  for (int x = 0; x < 2; ++x)
    for (int k = 0; k < 100; ++k) {
      Subject s;
      s.id = std::to_string(++id);
      Record r;
      r.time = 1;
      r.y = {k < (x == 0 ? n0_low : n1_low) ? 1 : 2};
      r.z = Eigen::VectorXd::Constant(1, x);
      s.records.push_back(r);
      p.subjects.push_back(s);
    }
  p.build_design();
  return p;
}

}  // namespace

TEST_CASE("ordinal_cdf examples") {
  const auto m = marginal({-1, 1});
  const Eigen::VectorXd x(0);
  CHECK(ordinal_cdf(m, 1, x) == Approx(0.15865525393145705).epsilon(1e-14));
  CHECK(ordinal_cdf(m, 2, x) == Approx(0.84134474606854293).epsilon(1e-14));
  CHECK(ordinal_cdf(m, 0, x) == 0.0);
  CHECK(ordinal_cdf(m, 3, x) == 1.0);
  CHECK(ordinal_cdf(marginal({0}, {}, Link::Logit), 1, x) == 0.5);
  CHECK_THROWS_AS(ordinal_cdf(marginal({1, -1}), 1, x), DomainError);
}

TEST_CASE("ordinal_pmf examples and sign convention") {
  const auto m = marginal({-1, 1});
  const Eigen::VectorXd x(0);
  CHECK(ordinal_pmf(m, 1, x) == Approx(0.15866).epsilon(1e-4));
  CHECK(ordinal_pmf(m, 2, x) == Approx(0.68269).epsilon(1e-4));
  CHECK(ordinal_pmf(m, 3, x) == Approx(0.15866).epsilon(1e-4));
  for (Link l : {Link::Probit, Link::Logit}) {
    CHECK(ordinal_pmf(marginal({0}, {}, l), 1, x) == 0.5);
    CHECK(ordinal_pmf(marginal({0}, {}, l), 2, x) == 0.5);
  }
  // F(alpha_y + x'beta): a positive slope moves mass toward low categories.
  const auto b = marginal({-1, 1}, {0.8});
  CHECK(ordinal_pmf(b, 1, Eigen::VectorXd::Constant(1, 1.0)) > ordinal_pmf(b, 1, Eigen::VectorXd::Constant(1, 0.0)));
}

TEST_CASE("pmf normalisation over random parameters") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> N(0, 1);
  std::uniform_int_distribution<int> KK(2, 8);
  for (int k = 0; k < 100; ++k) {
    const int K = KK(rng);
    std::vector<double> cut(K - 1);
    double c = N(rng) - 1.5;
    for (auto& v : cut) {
      v = c;
      c += std::exp(N(rng) - 0.5);
    }
    const auto m = marginal(cut, {N(rng), N(rng)}, k % 2 ? Link::Logit : Link::Probit);
    const Eigen::Vector2d x(N(rng), N(rng));
    double s = 0;
    for (int y = 1; y <= K; ++y) {
      const double p = ordinal_pmf(m, y, x);
      CHECK(p >= 0.0);
      s += p;
    }
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("loglik_independent examples") {
  const auto one = panel_from_paths({2}, {{{1}}});
  CHECK(loglik_independent(marginal({0}), one, 0).value == Approx(std::log(0.5)).epsilon(1e-15));
  const auto two = panel_from_paths({2}, {{{1}}, {{1}}});
  CHECK(loglik_independent(marginal({0}), two, 0).value == Approx(2 * std::log(0.5)).epsilon(1e-15));

  // counts (a, b, c) = (3, 5, 2) with cutpoints (-1, 1)
  std::vector<std::vector<std::vector<int>>> paths;
  for (int k = 0; k < 3; ++k) paths.push_back({{1}});
  for (int k = 0; k < 5; ++k) paths.push_back({{2}});
  for (int k = 0; k < 2; ++k) paths.push_back({{3}});
  const auto p = panel_from_paths({3}, paths);
  const double p1 = norm_cdf(-1.0), p2 = norm_cdf(1.0) - norm_cdf(-1.0);
  const double hand = 3 * std::log(p1) + 5 * std::log(p2) + 2 * std::log(p1);
  CHECK(loglik_independent(marginal({-1, 1}), p, 0).value == Approx(hand).epsilon(1e-14));
}

TEST_CASE("zero probability is flagged with its location") {
  const auto p = panel_from_paths({2}, {{{1}, {1}}, {{1}, {2}}});
  const LogLik ll = loglik_independent(marginal({40.0}), p, 0);
  CHECK(ll.underflows == 1);
  REQUIRE(ll.first_underflow.has_value());
  CHECK(ll.first_underflow->subject == 1);
  CHECK(ll.first_underflow->record == 1);
  CHECK(std::isfinite(ll.value));
  CHECK_THROWS_AS(ll.require_finite(), ZeroProbabilityError);
}

TEST_CASE("2x2 table: step 1(a) reproduces the closed-form MLE") {
  const auto p = two_by_two(30, 60);
  FitOptions opt;
  opt.optimizer.tol = 1e-8;
  const SeriesFit probit = fit_step1(p, 0, BivCopulaFamily::independence(), Link::Probit, {}, opt);
  REQUIRE(probit.estimates.names.size() == 2);
  CHECK(probit.estimates.names[0] == "y.beta[x]");
  CHECK(probit.estimates.value(0) == Approx(oracle::kProbitBeta).epsilon(1e-6));
  CHECK(probit.estimates.value(1) == Approx(oracle::kProbitCut).epsilon(1e-6));
  REQUIRE(probit.estimates.se.size() == 2);
  CHECK(probit.estimates.se(0) == Approx(oracle::kProbitSeBeta).epsilon(1e-4));
  CHECK(probit.estimates.se(1) == Approx(oracle::kProbitSeCut).epsilon(1e-4));

  const SeriesFit logit = fit_step1(p, 0, BivCopulaFamily::independence(), Link::Logit, {}, opt);
  CHECK(logit.estimates.value(0) == Approx(oracle::kLogitBeta).epsilon(1e-6));
  CHECK(logit.estimates.value(1) == Approx(oracle::kLogitCut).epsilon(1e-6));
}
