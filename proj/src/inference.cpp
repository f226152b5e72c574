#include "ordcop/inference.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "ordcop/errors.hpp"
#include "ordcop/parallel.hpp"

namespace ordcop {

Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x, double rel_step) {
  const auto n = x.size();
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h(i) = rel_step * std::max(1.0, std::abs(x(i)));
  const double f0 = f(x);
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp(i) = x(i) + h(i);
    const double fp = f(xp);
    xp(i) = x(i) - h(i);
    const double fm = f(xp);
    xp(i) = x(i);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      auto at = [&](double si, double sj) {
        xp(i) = x(i) + si * h(i);
        xp(j) = x(j) + sj * h(j);
        const double v = f(xp);
        xp(i) = x(i);
        xp(j) = x(j);
        return v;
      };
      H(i, j) = H(j, i) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h(i) * h(j));
    }
  }
  if (!H.allFinite()) throw NumericalError("numerical Hessian is not finite");
  return H;
}

Eigen::MatrixXd numerical_jacobian(const ReportingMap& g, const Eigen::VectorXd& x, double rel_step) {
  const Eigen::VectorXd g0 = g(x);
  Eigen::MatrixXd J(g0.size(), x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    const Eigen::VectorXd gp = g(xp);
    xp(i) = x(i) - h;
    const Eigen::VectorXd gm = g(xp);
    xp(i) = x(i);
    J.col(i) = (gp - gm) / (2.0 * h);
  }
  return J;
}

SeResult hessian_se(const Objective& f, const Eigen::VectorXd& argmax, const ReportingMap& report,
                    double rel_step) {
  SeResult out;
  out.hessian = numerical_hessian(f, argmax, rel_step);
  const Eigen::MatrixXd neg = -out.hessian;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(neg);
  const Eigen::VectorXd ev = eig.eigenvalues();
  if (ev.size() > 0 && !(ev.minCoeff() > 0.0)) {
    throw HessianNotNegativeDefinite("Hessian is not negative definite at the reported maximum",
                                     std::vector<double>(ev.data(), ev.data() + ev.size()));
  }
  const Eigen::MatrixXd inv = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  if (report) {
    const Eigen::MatrixXd J = numerical_jacobian(report, argmax);
    out.estimate = report(argmax);
    out.cov = J * inv * J.transpose();
  } else {
    out.estimate = argmax;
    out.cov = inv;
  }
  out.se = out.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

WaldResult wald_test(double estimate, double se) {
  if (!(se > 0.0)) throw DomainError("wald_test: standard error must be positive");
  const double z = estimate / se;
  return {z, normal_two_sided_p(z)};
}

VuongResult vuong_test(std::span<const double> model1, std::span<const double> model2) {
  if (model1.size() != model2.size()) throw DomainError("vuong_test: term vectors differ in length");
  const std::size_t n = model1.size();
  if (n < 2) throw DomainError("vuong_test: need at least two terms");
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += model2[i] - model1[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = (model2[i] - model1[i]) - mean;
    ss += e * e;
  }
  const double s = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(s > 1e-14 * std::max(1.0, std::abs(mean))))
    throw DegenerateVarianceError("vuong_test: log-likelihood differences have zero variance");
  VuongResult r;
  r.N = n;
  r.d_bar = mean;
  r.s = s;
  r.z0 = std::sqrt(static_cast<double>(n)) * mean / s;
  r.p_value = normal_two_sided_p(r.z0);
  return r;
}

JackknifeResult jackknife_se(std::size_t n, const SubsetEstimator& estimator, std::size_t min_n, int threads) {
  if (n < min_n || n < 2)
    throw DomainError("jackknife_se: need at least " + std::to_string(std::max<std::size_t>(min_n, 2)) + " units");
  std::vector<std::optional<Eigen::VectorXd>> est(n);
  std::vector<std::string> why(n);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<std::size_t> keep;
    keep.reserve(n - 1);
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) keep.push_back(k);
    try {
      est[i] = estimator(keep);
    } catch (const std::exception& e) {
      why[i] = e.what();
    }
  });
  JackknifeResult out;
  Eigen::Index p = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (!est[i]) {
      out.failures.push_back("replicate " + std::to_string(i) + ": " + why[i]);
      continue;
    }
    if (p < 0) p = est[i]->size();
    if (est[i]->size() != p) throw NumericalError("jackknife_se: replicate estimates differ in length");
    ++out.used;
  }
  out.dropped = n - out.used;
  if (out.used < 2) throw NumericalError("jackknife_se: fewer than two replicates succeeded");
  out.mean = Eigen::VectorXd::Zero(p);
  for (const auto& e : est)
    if (e) out.mean += *e;
  out.mean /= static_cast<double>(out.used);
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(p);
  for (const auto& e : est)
    if (e) ss += (*e - out.mean).cwiseAbs2();
  const double m = static_cast<double>(out.used);
  out.se = ((m - 1.0) / m * ss).cwiseSqrt();
  return out;
}

}  // namespace ordcop
