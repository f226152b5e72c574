#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "ordcop/simulate.hpp"

using namespace ordcop;
using namespace testutil;
using doctest::Approx;

namespace {

double ks_statistic(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  return d;
}

}  // namespace

TEST_CASE("independent MVN copula gives uniform margins (KS at 1%)") {
  std::mt19937_64 rng(1);
  const auto R = CorrelationMatrix::identity(2);
  const int n = 100000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    const auto u = sample_link_copula(R, LinkCopula::mvn(), rng);
    a[i] = u(0);
    b[i] = u(1);
  }
  const double crit = 1.628 / std::sqrt(static_cast<double>(n));
  CHECK(ks_statistic(a) < crit);
  CHECK(ks_statistic(b) < crit);
}

TEST_CASE("elliptical tau of the link copula sample") {
  std::mt19937_64 rng(2);
  const auto R = CorrelationMatrix::exchangeable(2, 0.5);
  // batch means over 20 blocks of 5000 pairs
  std::vector<double> taus;
  for (int blk = 0; blk < 20; ++blk) {
    std::vector<double> a(5000), b(5000);
    for (int i = 0; i < 5000; ++i) {
      const auto u = sample_link_copula(R, LinkCopula::mvn(), rng);
      a[i] = u(0);
      b[i] = u(1);
    }
    taus.push_back(empirical_kendall_tau(a, b));
  }
  double m = 0, v = 0;
  for (double t : taus) m += t / 20.0;
  for (double t : taus) v += (t - m) * (t - m) / 19.0;
  CHECK(std::abs(m - 1.0 / 3.0) <= 3.0 * std::sqrt(v / 20.0));
}

TEST_CASE("MVT link shows joint tail dependence, MVN does not") {
  std::mt19937_64 rng(3);
  const auto R = CorrelationMatrix::identity(2);
  const int n = 400000;
  int t_hits = 0, n_hits = 0;
  for (int i = 0; i < n; ++i) {
    const auto u = sample_link_copula(R, LinkCopula::mvt(4), rng);
    t_hits += u(0) < 0.01 && u(1) < 0.01;
    const auto z = sample_link_copula(R, LinkCopula::mvn(), rng);
    n_hits += z(0) < 0.01 && z(1) < 0.01;
  }
  // Independence would give 1e-4 * n = 40 hits with sd about 6.3.
  CHECK(t_hits > 40 + 4 * 6.3);
  CHECK(std::abs(n_hits - 40) < 4 * 6.3);
}

TEST_CASE("simulate_panel determinism and thread independence") {
  const std::vector<SeriesModel> sm{series({-0.3, 0.4}, BivCopulaFamily::frank(), 3.0, {0.5}),
                                    series({0.1}, BivCopulaFamily::gumbel(), 1.5, {-0.2})};
  const SimDesign d = design_with_covariates(300, 4, sm, 0.4, LinkCopula::mvt(6), 99);
  const OrdinalPanel a = simulate_panel(d), b = simulate_panel(d), c = simulate_panel(d, 4);
  CHECK(a == b);
  CHECK(a == c);
  SimDesign d2 = d;
  d2.seed = 100;
  CHECK(!(simulate_panel(d2) == a));
  CHECK(sample_link_copula(d.jp.R, d.jp.link, 5) == sample_link_copula(d.jp.R, d.jp.link, 5));
}

TEST_CASE("independence everywhere reproduces the marginal pmf") {
  const std::vector<SeriesModel> sm{series({-0.6, 0.3, 1.1}, BivCopulaFamily::independence(), 0),
                                    series({0.4}, BivCopulaFamily::independence(), 0)};
  const SimDesign d = design_with_covariates(20000, 2, sm, 0.0, LinkCopula::mvn(), 7);
  const OrdinalPanel p = simulate_panel(d);
  std::vector<double> counts(4, 0.0);
  for (const auto& s : p.subjects)
    for (const auto& r : s.records) counts[r.y[0] - 1] += 1.0;
  const double n = 40000;
  for (int y = 1; y <= 4; ++y) {
    const double pr = ordinal_pmf(sm[0].marginal, y, Eigen::VectorXd(0));
    CHECK(std::abs(counts[y - 1] / n - pr) <= 4.0 * std::sqrt(pr * (1 - pr) / n));
  }
}

TEST_CASE("conditional frequencies follow the transition cdf") {
  const std::vector<SeriesModel> sm{series({-0.5, 0.5}, BivCopulaFamily::gumbel(), 2.0),
                                    series({0.0}, BivCopulaFamily::bvn(), 0.5)};
  const SimDesign d = design_with_covariates(20000, 3, sm, 0.5, LinkCopula::mvn(), 8);
  const OrdinalPanel p = simulate_panel(d);
  std::map<std::pair<int, int>, double> pairs;
  std::vector<double> from(4, 0.0);
  for (const auto& s : p.subjects)
    for (std::size_t r = 1; r < s.records.size(); ++r) {
      pairs[{s.records[r - 1].y[0], s.records[r].y[0]}] += 1.0;
      from[s.records[r - 1].y[0]] += 1.0;
    }
  const Eigen::VectorXd x(0);
  for (int a = 1; a <= 3; ++a) {
    double cum = 0;
    for (int b = 1; b <= 2; ++b) {
      cum += pairs[{a, b}];
      const double pr = transition_cdf(sm[0], b, a, x, x);
      CHECK(std::abs(cum / from[a] - pr) <= 4.0 * std::sqrt(pr * (1 - pr) / from[a]));
    }
  }
}

TEST_CASE("average simulated log-likelihood approaches the negative entropy") {
  JointParams jp;
  jp.series = {series({0.2}, BivCopulaFamily::frank(), 3.0), series({-0.3}, BivCopulaFamily::gumbel(), 1.7)};
  jp.R = CorrelationMatrix::exchangeable(2, 0.4);
  QmcConfig cfg;
  // exact path probabilities by enumeration
  double neg_entropy = 0;
  std::vector<double> terms;
  for (int a1 = 1; a1 <= 2; ++a1)
    for (int a2 = 1; a2 <= 2; ++a2)
      for (int b1 = 1; b1 <= 2; ++b1)
        for (int b2 = 1; b2 <= 2; ++b2) {
          const double ll = joint_loglik(jp, panel_from_paths({2, 2}, {{{a1, a2}, {b1, b2}}}), cfg).value;
          neg_entropy += std::exp(ll) * ll;
          terms.push_back(ll);
        }
  SimDesign d;
  d.n = 20000;
  d.T = 2;
  d.jp = jp;
  d.series_columns = {{}, {}};
  d.seed = 10;
  const OrdinalPanel p = simulate_panel(d);
  const LogLik ll = joint_loglik(jp, p, cfg);
  double var = 0;
  for (double t : ll.subject_terms) var += (t - ll.value / d.n) * (t - ll.value / d.n);
  var /= (d.n - 1);
  CHECK(std::abs(ll.value / d.n - neg_entropy) <= 4.0 * std::sqrt(var / d.n));
}
