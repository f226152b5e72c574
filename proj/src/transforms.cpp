#include "ordcop/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ordcop/errors.hpp"

namespace ordcop {

Eigen::VectorXd cutpoints_to_free(const Eigen::VectorXd& cut) {
  Eigen::VectorXd f(cut.size());
  for (Eigen::Index k = 0; k < cut.size(); ++k) {
    if (k == 0) {
      f(0) = cut(0);
      continue;
    }
    const double gap = cut(k) - cut(k - 1);
    if (!(gap > 0.0)) throw DomainError("cutpoints must be strictly increasing");
    f(k) = std::log(gap);
  }
  return f;
}

Eigen::VectorXd cutpoints_from_free(const Eigen::VectorXd& free) {
  Eigen::VectorXd c(free.size());
  for (Eigen::Index k = 0; k < free.size(); ++k) c(k) = k == 0 ? free(0) : c(k - 1) + std::exp(free(k));
  return c;
}

namespace {

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double softplus_inv(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

int theta_free_size(const BivCopulaFamily& f) { return f.tag == Family::Independence ? 0 : 1; }

double theta_to_free(const BivCopulaFamily& f, double theta) {
  switch (f.tag) {
    case Family::BVN:
    case Family::BVT:
      return std::atanh(theta);
    case Family::Frank:
      return theta;
    case Family::Gumbel:
    case Family::SurvivalGumbel:
      if (!(theta > 1.0)) return -40.0;
      return softplus_inv(std::min(theta, kGumbelThetaCap) - 1.0);
    case Family::Independence:
      return 0.0;
  }
  return 0.0;
}

double theta_from_free(const BivCopulaFamily& f, double x) {
  switch (f.tag) {
    case Family::BVN:
    case Family::BVT:
      return std::clamp(std::tanh(x), -1.0 + 1e-12, 1.0 - 1e-12);
    case Family::Frank:
      return x;
    case Family::Gumbel:
    case Family::SurvivalGumbel:
      return std::min(1.0 + softplus(x), kGumbelThetaCap);
    case Family::Independence:
      return 0.0;
  }
  return 0.0;
}

int corr_free_size(int d) { return d * (d - 1) / 2; }

// Row i of the Cholesky factor is a unit vector written in spherical
// coordinates: L(i,0) = cos a_i0, L(i,k) = cos a_ik * prod_{m<k} sin a_im,
// L(i,i) = prod_{m<i} sin a_im.
Eigen::MatrixXd corr_from_free(const Eigen::VectorXd& free, int d) {
  if (free.size() != corr_free_size(d)) throw DomainError("corr_from_free: wrong number of angles");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d, d);
  L(0, 0) = 1.0;
  Eigen::Index idx = 0;
  for (int i = 1; i < d; ++i) {
    double prod = 1.0;
    for (int k = 0; k < i; ++k) {
      const double angle = std::numbers::pi * logistic(free(idx++));
      L(i, k) = std::cos(angle) * prod;
      prod *= std::sin(angle);
    }
    L(i, i) = prod;
  }
  Eigen::MatrixXd R = L * L.transpose();
  R.diagonal().setOnes();
  return R;
}

Eigen::VectorXd corr_to_free(const Eigen::MatrixXd& R) {
  const auto d = R.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) throw DecompositionError("corr_to_free: matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::VectorXd f(corr_free_size(static_cast<int>(d)));
  Eigen::Index idx = 0;
  for (Eigen::Index i = 1; i < d; ++i) {
    const double norm = L.row(i).head(i + 1).norm();
    double prod = 1.0;
    for (Eigen::Index k = 0; k < i; ++k) {
      const double c = std::clamp(L(i, k) / norm / prod, -1.0, 1.0);
      const double angle = std::acos(c);
      const double p = angle / std::numbers::pi;
      f(idx++) = std::log(p) - std::log1p(-p);
      prod *= std::sin(angle);
    }
  }
  return f;
}

int series_free_size(const SeriesModel& m) {
  return static_cast<int>(m.marginal.beta.size() + m.marginal.cutpoints.size()) +
         theta_free_size(m.temporal.family);
}

Eigen::VectorXd series_to_free(const SeriesModel& m) {
  const auto p = m.marginal.beta.size();
  const auto c = m.marginal.cutpoints.size();
  Eigen::VectorXd f(series_free_size(m));
  f.head(p) = m.marginal.beta;
  f.segment(p, c) = cutpoints_to_free(m.marginal.cutpoints);
  if (theta_free_size(m.temporal.family) == 1) f(p + c) = theta_to_free(m.temporal.family, m.temporal.theta);
  return f;
}

SeriesModel series_from_free(const SeriesModel& like, const Eigen::VectorXd& free) {
  if (free.size() != series_free_size(like)) throw DomainError("series_from_free: wrong vector length");
  SeriesModel m = like;
  const auto p = like.marginal.beta.size();
  const auto c = like.marginal.cutpoints.size();
  m.marginal.beta = free.head(p);
  m.marginal.cutpoints = cutpoints_from_free(free.segment(p, c));
  m.temporal.theta = theta_free_size(like.temporal.family) == 1
                         ? theta_from_free(like.temporal.family, free(p + c))
                         : 0.0;
  return m;
}

Eigen::VectorXd series_reporting(const SeriesModel& m) {
  const auto p = m.marginal.beta.size();
  const auto c = m.marginal.cutpoints.size();
  const int t = theta_free_size(m.temporal.family);
  Eigen::VectorXd r(p + c + t);
  r.head(p) = m.marginal.beta;
  r.segment(p, c) = m.marginal.cutpoints;
  if (t == 1) r(p + c) = m.temporal.theta;
  return r;
}

Eigen::VectorXd corr_offdiag(const Eigen::MatrixXd& R) {
  const auto d = R.rows();
  Eigen::VectorXd v(d * (d - 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) v(idx++) = R(i, j);
  return v;
}

}  // namespace ordcop
