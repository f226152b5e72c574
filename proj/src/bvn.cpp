#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "ordcop/copula_bivariate.hpp"
#include "ordcop/special.hpp"

namespace ordcop {
namespace {

struct GaussLegendre {
  std::vector<double> x, w;
};

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
GaussLegendre make_gauss_legendre(int n) {
  GaussLegendre g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    g.x[i] = z;
    g.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return g;
}

const GaussLegendre& gl_rule(double abs_r) {
  static const GaussLegendre g6 = make_gauss_legendre(6);
  static const GaussLegendre g12 = make_gauss_legendre(12);
  static const GaussLegendre g20 = make_gauss_legendre(20);
  if (abs_r < 0.3) return g6;
  if (abs_r < 0.75) return g12;
  return g20;
}

// Upper orthant P(X > dh, Y > dk).
double bvn_upper(double dh, double dk, double r) {
  constexpr double twopi = 2.0 * std::numbers::pi;
  const GaussLegendre& g = gl_rule(std::abs(r));
  const auto n = g.x.size();

  double h = dh, k = dk, hk = h * k, bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (std::size_t i = 0; i < n; ++i) {
      const double sn = std::sin(asr * (g.x[i] + 1.0) / 2.0);
      bvn += g.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * twopi) + norm_sf(h) * norm_sf(k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    const double asr0 = -(bs / as + hk) / 2.0;
    if (asr0 > -100.0)
      bvn = a * std::exp(asr0) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(twopi) * norm_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xs = std::pow(a * (g.x[i] + 1.0), 2);
      const double rs = std::sqrt(1.0 - xs);
      const double asr = -(bs / xs + hk) / 2.0;
      if (asr > -100.0) {
        bvn += a * g.w[i] * std::exp(asr) *
               (std::exp(-hk * xs / (2.0 * (1.0 + rs) * (1.0 + rs))) / rs -
                (1.0 + c * xs * (1.0 + d * xs)));
      }
    }
    bvn = -bvn / twopi;
  }
  if (r > 0.0) {
    bvn += norm_sf(std::max(h, k));
  } else {
    bvn = -bvn;
    if (k > h) {
      if (h < 0.0)
        bvn += norm_cdf(k) - norm_cdf(h);
      else
        bvn += norm_sf(h) - norm_sf(k);
    }
  }
  return bvn;
}

}  // namespace

double bvn_cdf(double h, double k, double rho) {
  if (h == -kInf || k == -kInf) return 0.0;
  if (h == kInf) return norm_cdf(k);
  if (k == kInf) return norm_cdf(h);
  if (rho == 0.0) return norm_cdf(h) * norm_cdf(k);
  return std::clamp(bvn_upper(-h, -k, rho), 0.0, 1.0);
}

}  // namespace ordcop
