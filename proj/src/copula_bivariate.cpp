#include "ordcop/copula_bivariate.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "ordcop/errors.hpp"
#include "ordcop/special.hpp"

namespace ordcop {

std::string family_name(const BivCopulaFamily& f) {
  switch (f.tag) {
    case Family::BVN: return "bvn";
    case Family::BVT: return "bvt";
    case Family::Frank: return "frank";
    case Family::Gumbel: return "gumbel";
    case Family::SurvivalGumbel: return "sgumbel";
    case Family::Independence: return "independence";
  }
  return "unknown";
}

BivCopulaFamily parse_family(const std::string& name, double nu) {
  if (name == "bvn") return BivCopulaFamily::bvn();
  if (name == "bvt") {
    if (!(nu > 0.0)) throw DomainError("bvt family requires nu > 0");
    return BivCopulaFamily::bvt(nu);
  }
  if (name == "frank") return BivCopulaFamily::frank();
  if (name == "gumbel") return BivCopulaFamily::gumbel();
  if (name == "sgumbel" || name == "survival_gumbel") return BivCopulaFamily::survival_gumbel();
  if (name == "independence") return BivCopulaFamily::independence();
  throw DomainError("unknown copula family '" + name + "'");
}

void validate(const BivCopulaSpec& spec) {
  const double t = spec.theta;
  if (!std::isfinite(t))
    throw DomainError(family_name(spec.family) + ": dependence parameter must be finite");
  switch (spec.family.tag) {
    case Family::BVT:
      if (!(spec.family.nu > 0.0)) throw DomainError("bvt: degrees of freedom must be > 0");
      [[fallthrough]];
    case Family::BVN:
      if (!(t > -1.0 && t < 1.0))
        throw DomainError(family_name(spec.family) + ": theta must lie in (-1, 1)");
      break;
    case Family::Gumbel:
    case Family::SurvivalGumbel:
      if (!(t >= 1.0)) throw DomainError(family_name(spec.family) + ": theta must be >= 1");
      break;
    case Family::Frank:
    case Family::Independence:
      break;
  }
}

namespace {

double frank_positive(double theta, double u1, double u2) {
  const double num = std::expm1(-theta * u1) * std::expm1(-theta * u2);
  return -std::log1p(num / std::expm1(-theta)) / theta;
}

double frank_cdf(double theta, double u1, double u2) {
  if (std::abs(theta) < kFrankIndependenceBand) return u1 * u2;
  if (theta > 0.0) return frank_positive(theta, u1, u2);
  // (U, 1 - V) has Frank parameter -theta.
  return u1 - frank_positive(-theta, u1, 1.0 - u2);
}

double gumbel_cdf(double theta, double u1, double u2) {
  const double a = -std::log(u1), b = -std::log(u2);
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (hi == 0.0) return 1.0;
  const double ratio = std::pow(lo / hi, theta);
  const double s = hi * std::exp(std::log1p(ratio) / theta);
  return std::exp(-s);
}

double interior_cdf(const BivCopulaSpec& spec, double u1, double u2) {
  switch (spec.family.tag) {
    case Family::Independence: return u1 * u2;
    case Family::Frank: return frank_cdf(spec.theta, u1, u2);
    case Family::Gumbel: return gumbel_cdf(spec.theta, u1, u2);
    case Family::SurvivalGumbel:
      return u1 + u2 - 1.0 + gumbel_cdf(spec.theta, 1.0 - u1, 1.0 - u2);
    case Family::BVN: return bvn_cdf(norm_quantile(u1), norm_quantile(u2), spec.theta);
    case Family::BVT: {
      const double nu = spec.family.nu;
      return bvt_cdf(t_quantile(u1, nu), t_quantile(u2, nu), spec.theta, nu);
    }
  }
  return 0.0;
}

}  // namespace

double biv_cdf(const BivCopulaSpec& spec, double u1, double u2) {
  validate(spec);
  if (!(u1 >= 0.0 && u1 <= 1.0 && u2 >= 0.0 && u2 <= 1.0))
    throw DomainError("biv_cdf: arguments must lie in [0, 1]");
  if (u1 == 0.0 || u2 == 0.0) return 0.0;
  if (u1 == 1.0) return u2;
  if (u2 == 1.0) return u1;
  const double c = interior_cdf(spec, u1, u2);
  // Frechet bounds absorb round-off.
  return std::clamp(c, std::max(0.0, u1 + u2 - 1.0), std::min(u1, u2));
}

double biv_pmf_rect(const BivCopulaSpec& spec, double a1, double b1, double a2, double b2) {
  if (!(a1 <= b1 && a2 <= b2)) throw DomainError("biv_pmf_rect: need a1 <= b1 and a2 <= b2");
  validate(spec);
  if (a1 == b1 || a2 == b2) return 0.0;
  const double p = biv_cdf(spec, b1, b2) - biv_cdf(spec, a1, b2) - biv_cdf(spec, b1, a2) +
                   biv_cdf(spec, a1, a2);
  return std::max(p, 0.0);
}

namespace {

// Debye function D1(x) = (1/x) int_0^x t/(e^t - 1) dt for x > 0.
double debye1(double x) {
  auto f = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, x, 15, 1e-14, &err);
  return integral / x;
}

double frank_tau(double theta) {
  if (std::abs(theta) < kFrankIndependenceBand) return 0.0;
  if (std::abs(theta) < 1e-3) return theta / 9.0 - theta * theta * theta / 900.0;
  const double a = std::abs(theta);
  const double tau = 1.0 + 4.0 / a * (debye1(a) - 1.0);
  return theta > 0.0 ? tau : -tau;
}

}  // namespace

double kendall_tau(const BivCopulaSpec& spec) {
  validate(spec);
  switch (spec.family.tag) {
    case Family::BVN:
    case Family::BVT: return 2.0 / std::numbers::pi * std::asin(spec.theta);
    case Family::Frank: return frank_tau(spec.theta);
    case Family::Gumbel:
    case Family::SurvivalGumbel: return 1.0 - 1.0 / spec.theta;
    case Family::Independence: return 0.0;
  }
  return 0.0;
}

double param_from_tau(const BivCopulaFamily& family, double tau) {
  if (!(tau > -1.0 && tau < 1.0)) throw DomainError("param_from_tau: tau must lie in (-1, 1)");
  switch (family.tag) {
    case Family::BVN:
    case Family::BVT: return std::sin(std::numbers::pi * tau / 2.0);
    case Family::Gumbel:
    case Family::SurvivalGumbel:
      if (tau < 0.0)
        throw DomainError(family_name(family) + ": negative Kendall's tau is not attainable");
      return 1.0 / (1.0 - tau);
    case Family::Frank: {
      if (tau == 0.0) return 0.0;
      constexpr double bound = 50.0;
      const double tmax = frank_tau(bound);
      if (std::abs(tau) >= tmax)
        throw DomainError("frank: |tau| beyond the attainable range of theta in [-50, 50]");
      auto f = [tau](double th) { return frank_tau(th) - tau; };
      std::uintmax_t iters = 200;
      const double lo = tau > 0.0 ? 1e-9 : -bound;
      const double hi = tau > 0.0 ? bound : -1e-9;
      auto [a, b] = boost::math::tools::toms748_solve(
          f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
      return 0.5 * (a + b);
    }
    case Family::Independence:
      if (tau != 0.0) throw DomainError("independence: only tau = 0 is attainable");
      return 0.0;
  }
  return 0.0;
}

namespace {

// Positive stable variable with Laplace transform exp(-t^alpha), 0 < alpha <= 1 (Kanter).
double positive_stable(double alpha, std::mt19937_64& rng) {
  if (alpha >= 1.0) return 1.0;
  std::uniform_real_distribution<double> unif(0.0, std::numbers::pi);
  std::exponential_distribution<double> expo(1.0);
  const double u = unif(rng);
  const double w = expo(rng);
  return std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha) *
         std::pow(std::sin((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
}

double open_uniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u;
  do {
    u = unif(rng);
  } while (u <= 0.0);
  return u;
}

}  // namespace

Eigen::MatrixX2d sample_biv_copula(const BivCopulaSpec& spec, std::size_t n, std::mt19937_64& rng) {
  validate(spec);
  Eigen::MatrixX2d out(static_cast<Eigen::Index>(n), 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const double theta = spec.theta;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double u1 = 0.0, u2 = 0.0;
    switch (spec.family.tag) {
      case Family::Independence:
        u1 = open_uniform(rng);
        u2 = open_uniform(rng);
        break;
      case Family::BVN: {
        const double z1 = gauss(rng);
        const double z2 = theta * z1 + std::sqrt(1.0 - theta * theta) * gauss(rng);
        u1 = norm_cdf(z1);
        u2 = norm_cdf(z2);
        break;
      }
      case Family::BVT: {
        const double nu = spec.family.nu;
        std::chi_squared_distribution<double> chi(nu);
        const double z1 = gauss(rng);
        const double z2 = theta * z1 + std::sqrt(1.0 - theta * theta) * gauss(rng);
        const double s = std::sqrt(chi(rng) / nu);
        u1 = t_cdf(z1 / s, nu);
        u2 = t_cdf(z2 / s, nu);
        break;
      }
      case Family::Frank: {
        u1 = open_uniform(rng);
        const double v = open_uniform(rng);
        if (std::abs(theta) < kFrankIndependenceBand) {
          u2 = v;
        } else {
          const double a = v * std::expm1(-theta) / (v + (1.0 - v) * std::exp(-theta * u1));
          u2 = -std::log1p(a) / theta;
        }
        break;
      }
      case Family::Gumbel:
      case Family::SurvivalGumbel: {
        const double alpha = 1.0 / theta;
        const double s = positive_stable(alpha, rng);
        u1 = std::exp(-std::pow(expo(rng) / s, alpha));
        u2 = std::exp(-std::pow(expo(rng) / s, alpha));
        if (spec.family.tag == Family::SurvivalGumbel) {
          u1 = 1.0 - u1;
          u2 = 1.0 - u2;
        }
        break;
      }
    }
    out(i, 0) = u1;
    out(i, 1) = u2;
  }
  return out;
}

namespace {

// Merge sort on v counting the number of inversions.
std::uint64_t count_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                          std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = count_swaps(v, buf, lo, mid) + count_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      buf[k++] = v[j++];
      swaps += mid - i;
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return swaps;
}

template <typename Eq>
std::uint64_t tie_pairs(std::size_t n, Eq&& same) {
  std::uint64_t total = 0, run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (same(i - 1, i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total + run * (run - 1) / 2;
}

}  // namespace

double empirical_kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("empirical_kendall_tau: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("empirical_kendall_tau: need at least two pairs");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t n1 = tie_pairs(n, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
  const std::uint64_t n3 = tie_pairs(
      n, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b] && ys[a] == ys[b]; });
  std::vector<double> buf(n);
  const std::uint64_t swaps = count_swaps(ys, buf, 0, n);
  const std::uint64_t n2 = tie_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });
  const double num = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) +
                     static_cast<double>(n3) - 2.0 * static_cast<double>(swaps);
  const double den = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace ordcop
