#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ordcop/errors.hpp"
#include "ordcop/inference.hpp"

using namespace ordcop;
using doctest::Approx;

TEST_CASE("hessian_se on a Gaussian quadratic") {
  const double sigma = 0.37;
  const auto f = [&](const Eigen::VectorXd& x) { return -x(0) * x(0) / (2 * sigma * sigma); };
  const SeResult r = hessian_se(f, Eigen::VectorXd::Zero(1));
  CHECK(std::abs(r.se(0) - sigma) < 1e-6);
}

TEST_CASE("hessian_se rejects a saddle and reports eigenvalues") {
  const auto f = [](const Eigen::VectorXd& x) { return -x(0) * x(0) + x(1) * x(1); };
  try {
    hessian_se(f, Eigen::VectorXd::Zero(2));
    FAIL("expected HessianNotNegativeDefinite");
  } catch (const HessianNotNegativeDefinite& e) {
    REQUIRE(e.eigenvalues.size() == 2);
    CHECK(std::min(e.eigenvalues[0], e.eigenvalues[1]) < 0.0);
  }
}

TEST_CASE("hessian_se is equivariant under a linear reparameterisation") {
  Eigen::Matrix2d A;
  A << 2.0, 0.3, 0.3, 0.5;
  const auto f = [&](const Eigen::VectorXd& x) { return -0.5 * x.dot(A * x) + 0.1 * x(0); };
  const Eigen::VectorXd xm = A.inverse() * Eigen::Vector2d(0.1, 0.0);
  const Eigen::Vector2d scale(3.0, -0.25);
  const SeResult base = hessian_se(f, xm);
  const SeResult mapped = hessian_se(f, xm, [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(scale.cwiseProduct(x)); });
  for (int k = 0; k < 2; ++k) CHECK(std::abs(mapped.se(k) - std::abs(scale(k)) * base.se(k)) < 1e-8);
}

TEST_CASE("wald_test examples") {
  const auto a = wald_test(0.0, 1.0);
  CHECK(a.z == 0.0);
  CHECK(a.p_value == 1.0);
  CHECK(wald_test(1.96, 1.0).p_value == Approx(0.05).epsilon(1e-3));
  const auto c = wald_test(-3.42 * 0.05, 0.05);
  CHECK(c.z == Approx(-3.42));
  CHECK(c.p_value == Approx(normal_two_sided_p(3.42)));
  CHECK_THROWS_AS(wald_test(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(wald_test(1.0, -1.0), DomainError);
}

TEST_CASE("vuong_test examples and invariances") {
  const std::vector<double> m1{0.0, 0.0, 0.0, 0.0}, m2{0.1, -0.1, 0.2, 0.2};
  const VuongResult v = vuong_test(m1, m2);
  CHECK(v.d_bar == Approx(0.1).epsilon(1e-14));
  CHECK(v.s * v.s == Approx(0.02).epsilon(1e-12));
  CHECK(v.z0 == Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(v.p_value == Approx(0.157299).epsilon(1e-5));
  CHECK(v.N == 4);
  CHECK_THROWS_AS(vuong_test(m2, m2), DegenerateVarianceError);
  CHECK_THROWS_AS(vuong_test(std::vector<double>{1.0}, std::vector<double>{2.0}), DomainError);
  CHECK_THROWS_AS(vuong_test(m1, std::vector<double>{1.0, 2.0}), DomainError);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(-2, 1);
  std::vector<double> a(50), b(50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = N(rng);
    b[i] = N(rng);
  }
  CHECK(vuong_test(a, b).z0 == -vuong_test(b, a).z0);
  std::vector<double> a2 = a, b2 = b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a2[i] += 7.0;
    b2[i] += 7.0;
  }
  CHECK(vuong_test(a2, b2).z0 == Approx(vuong_test(a, b).z0).epsilon(1e-12));
}

TEST_CASE("jackknife of a mean") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N(1.0, 2.0);
  std::vector<double> x(100);
  for (auto& v : x) v = N(rng);
  auto mean_of = [&](const std::vector<double>& data) {
    return [&data](const std::vector<std::size_t>& keep) {
      double s = 0;
      for (auto i : keep) s += data[i];
      return Eigen::VectorXd::Constant(1, s / static_cast<double>(keep.size()));
    };
  };
  const JackknifeResult r = jackknife_se(x.size(), mean_of(x));
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / 100.0;
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  const double s_over_root_n = std::sqrt(ss / 99.0) / 10.0;
  CHECK(std::abs(r.se(0) / s_over_root_n - 1.0) < 0.1);
  CHECK(r.used == 100);

  // Duplicating every unit halves the variance relative to the half panel.
  std::vector<double> half(x.begin(), x.begin() + 50), dup = half;
  dup.insert(dup.end(), half.begin(), half.end());
  const double se_half = jackknife_se(half.size(), mean_of(half)).se(0);
  const double se_dup = jackknife_se(dup.size(), mean_of(dup)).se(0);
  CHECK(se_half / se_dup == Approx(std::sqrt(2.0)).epsilon(0.05));

  CHECK_THROWS_AS(jackknife_se(2, mean_of(x)), DomainError);

  // Failing replicates are dropped and disclosed.
  const JackknifeResult f = jackknife_se(40, [&](const std::vector<std::size_t>& keep) {
    if (keep.size() == 39 && keep[0] != 0 && keep[3] == 4) throw NumericalError("no");
    return Eigen::VectorXd::Constant(1, static_cast<double>(keep[0]));
  });
  CHECK(f.dropped == 1);
  CHECK(f.failures.size() == 1);
  CHECK(f.used == 39);
}
