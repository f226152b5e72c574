#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ordcop/copula_bivariate.hpp"
#include "ordcop/errors.hpp"
#include "ordcop/rect_prob.hpp"
#include "ordcop/special.hpp"
#include "oracle_values.hpp"

using namespace ordcop;
using doctest::Approx;

namespace {

Rectangle rect(std::vector<double> lo, std::vector<double> hi) {
  Rectangle r{Eigen::VectorXd(static_cast<Eigen::Index>(lo.size())), Eigen::VectorXd(static_cast<Eigen::Index>(hi.size()))};
  for (std::size_t i = 0; i < lo.size(); ++i) {
    r.lower(i) = lo[i];
    r.upper(i) = hi[i];
  }
  return r;
}

Rectangle orthant(int d, double b = 0.0) { return rect(std::vector<double>(d, -kInf), std::vector<double>(d, b)); }

// Random rectangle with some infinite limits.
Rectangle random_rect(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> z(-2.0, 2.0), w(0.3, 2.5), u(0.0, 1.0);
  Rectangle r{Eigen::VectorXd(d), Eigen::VectorXd(d)};
  for (int j = 0; j < d; ++j) {
    const double a = z(rng);
    r.lower(j) = u(rng) < 0.2 ? -kInf : a;
    r.upper(j) = u(rng) < 0.2 ? kInf : a + w(rng);
  }
  return r;
}

bool within(const RectProbability& p, double truth, double k = 3.0) {
  return std::abs(p.value - truth) <= k * p.std_error + 1e-15;
}

}  // namespace

TEST_CASE("mvn_rect spec examples") {
  const QmcConfig cfg;
  const auto q = mvn_rect(rect({0, 0}, {kInf, kInf}), CorrelationMatrix::identity(2), cfg);
  CHECK(q.value == Approx(0.25).epsilon(1e-12));

  const auto p2 = mvn_rect(orthant(2), CorrelationMatrix::exchangeable(2, 0.5), cfg);
  CHECK(within(p2, 1.0 / 3.0));
  const auto p3 = mvn_rect(orthant(3), CorrelationMatrix::exchangeable(3, 0.5), cfg);
  CHECK(within(p3, 0.25));
  CHECK(p3.std_error > 0.0);
}

TEST_CASE("mvt_rect spec examples") {
  const QmcConfig cfg;
  for (double nu : {1.0, 4.0, 30.0}) {
    const auto p = mvt_rect(rect({-kInf}, {t_quantile(0.9, nu)}), CorrelationMatrix::identity(1), nu, cfg);
    CHECK(p.value == Approx(0.9).epsilon(1e-12));
  }
  const auto p = mvt_rect(orthant(2), CorrelationMatrix::exchangeable(2, 0.3), 4.0, cfg);
  CHECK(within(p, bvt_cdf(0, 0, 0.3, 4)));
  const auto q = mvt_rect(rect({-0.4, -kInf}, {1.1, 0.2}), CorrelationMatrix::exchangeable(2, -0.5), 3.0, cfg);
  const double exact = bvt_cdf(1.1, 0.2, -0.5, 3) - bvt_cdf(-0.4, 0.2, -0.5, 3);
  CHECK(within(q, exact));
}

TEST_CASE("large nu MVT agrees with MVN") {
  QmcConfig cfg;
  cfg.points_per_shift = 1024;
  std::mt19937_64 rng(7);
  int bad = 0;
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 4;
    const auto r = random_rect(rng, d);
    const auto R = CorrelationMatrix::exchangeable(d, 0.4);
    const auto a = mvn_rect(r, R, cfg);
    const auto b = mvt_rect(r, R, 1e6, cfg);
    if (std::abs(a.value - b.value) > 3.0 * std::hypot(a.std_error, b.std_error) + 1e-6) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("exchangeable oracle examples") {
  CHECK(mvn_rect_exchangeable(orthant(2), 0.5) == Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(std::abs(mvn_rect_exchangeable(orthant(3), 0.5) - 0.25) < 1e-10);
  CHECK(std::abs(mvn_rect_exchangeable(rect(std::vector<double>(5, -kInf), std::vector<double>(5, kInf)), 0.5) - 1.0) < 1e-10);
  CHECK(std::abs(mvn_rect_exchangeable(orthant(3, -1.0), 0.5) - oracle::kExch3Cell111) < 1e-12);
  CHECK(std::abs(mvn_rect_exchangeable(rect({-kInf, -1, 0, 0.5}, {0, 1, kInf, 2}), 0.3) - oracle::kExch4Mixed) < 1e-12);
  CHECK_THROWS_AS(mvn_rect_exchangeable(orthant(2), 0.0), DomainError);
  CHECK_THROWS_AS(mvn_rect_exchangeable(orthant(2), 1.0), DomainError);

  std::mt19937_64 rng(99);
  const auto r = random_rect(rng, 10);
  const auto q = mvn_rect(r, CorrelationMatrix::exchangeable(10, 0.3), QmcConfig{});
  CHECK(within(q, mvn_rect_exchangeable(r, 0.3)));
}

TEST_CASE("determinism") {
  std::mt19937_64 rng(1);
  const auto r = random_rect(rng, 6);
  const auto R = CorrelationMatrix::exchangeable(6, 0.45);
  QmcConfig cfg;
  cfg.seed = 123;
  const auto a = mvn_rect(r, R, cfg), b = mvn_rect(r, R, cfg);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  const auto c = mvt_rect(r, R, 5, cfg), e = mvt_rect(r, R, 5, cfg);
  CHECK(c.value == e.value);
  cfg.seed = 124;
  CHECK(mvn_rect(r, R, cfg).value != a.value);
}

TEST_CASE("monotone under enlargement") {
  std::mt19937_64 rng(21);
  QmcConfig cfg;
  cfg.points_per_shift = 1024;
  for (int k = 0; k < 30; ++k) {
    const int d = 3 + k % 4;
    const auto small = random_rect(rng, d);
    Rectangle big = small;
    for (int j = 0; j < d; ++j) {
      big.lower(j) -= 0.3;
      big.upper(j) += 0.2;
    }
    CHECK(mvn_rect_exchangeable(big, 0.35) >= mvn_rect_exchangeable(small, 0.35));
    const auto R = CorrelationMatrix::exchangeable(d, 0.35);
    const auto a = mvn_rect(small, R, cfg), b = mvn_rect(big, R, cfg);
    CHECK(b.value >= a.value - 3.0 * std::hypot(a.std_error, b.std_error));
  }
}

TEST_CASE("MVT partition of R^3 into 27 rectangles sums to one") {
  const std::vector<double> cut{-kInf, -0.5, 0.7, kInf};
  Eigen::MatrixXd M(3, 3);
  M << 1, 0.3, -0.2, 0.3, 1, 0.5, -0.2, 0.5, 1;
  const CorrelationMatrix R(M);
  QmcConfig cfg;
  cfg.points_per_shift = 1024;
  double sum = 0, var = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const auto p = mvt_rect(rect({cut[a], cut[b], cut[c]}, {cut[a + 1], cut[b + 1], cut[c + 1]}), R, 6, cfg);
        sum += p.value;
        var += p.std_error * p.std_error;
      }
  CHECK(std::abs(sum - 1.0) <= 3.0 * std::sqrt(var) + 1e-12);
}

TEST_CASE("QMC error falls faster than Monte Carlo (d = 7)") {
  std::mt19937_64 rng(8);
  const auto r = random_rect(rng, 7);
  const auto R = CorrelationMatrix::exchangeable(7, 0.5);
  QmcConfig lo, hi;
  lo.points_per_shift = 1024;
  hi.points_per_shift = 4096;
  const auto a = mvn_rect(r, R, lo), b = mvn_rect(r, R, hi);
  CHECK(b.std_error * 2.0 < a.std_error);
}

TEST_CASE("degenerate and invalid inputs") {
  const QmcConfig cfg;
  const auto z = mvn_rect(rect({0.3, -1}, {0.3, 1}), CorrelationMatrix::identity(2), cfg);
  CHECK(z.value == 0.0);
  CHECK(z.std_error == 0.0);
  CHECK(mvn_rect(rect({-kInf, -kInf}, {kInf, kInf}), CorrelationMatrix::exchangeable(2, 0.2), cfg).value == 1.0);
  CHECK_THROWS_AS(mvn_rect(rect({1, 0}, {0, 1}), CorrelationMatrix::identity(2), cfg), DomainError);
  Eigen::MatrixXd bad(3, 3);
  bad << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
  CHECK_THROWS_AS(CorrelationMatrix{bad}, DecompositionError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.2, 0.3, 1;
  CHECK_THROWS_AS(CorrelationMatrix{asym}, DomainError);
  QmcConfig one = cfg;
  one.shifts = 1;
  CHECK_THROWS_AS(mvn_rect(orthant(2), CorrelationMatrix::identity(2), one), DomainError);
}

TEST_CASE("fixed integration order") {
  std::mt19937_64 rng(4);
  QmcConfig cfg;
  cfg.points_per_shift = 512;
  for (int k = 0; k < 10; ++k) {
    const auto r = random_rect(rng, 5);
    const auto R = CorrelationMatrix::exchangeable(5, 0.3);
    const auto order = rect_variable_order(r, R);
    const auto a = mvn_rect(r, R, cfg);
    const auto b = mvn_rect(r, R, cfg, order);
    CHECK(a.value == b.value);
    std::vector<int> natural{0, 1, 2, 3, 4};
    const auto c = mvn_rect(r, R, cfg, natural);
    CHECK(std::abs(c.value - a.value) <= 3.0 * std::hypot(a.std_error, c.std_error) + 1e-12);
    CHECK(std::abs(c.value - mvn_rect_exchangeable(r, 0.3)) <= 3.0 * c.std_error + 1e-12);
  }
}
