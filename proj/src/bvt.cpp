#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "ordcop/copula_bivariate.hpp"
#include "ordcop/special.hpp"

namespace ordcop {
namespace {

// Dunnett-Sobel series for integer nu, following Genz's BVTL.
double bvt_series(int nu, double dh, double dk, double r) {
  constexpr double pi = std::numbers::pi;
  constexpr double tpi = 2.0 * pi;
  constexpr double eps = 1e-15;
  const double dnu = nu;
  if (1.0 - r <= eps) return t_cdf(std::min(dh, dk), dnu);
  if (r + 1.0 <= eps) return dh > -dk ? t_cdf(dh, dnu) - t_cdf(-dk, dnu) : 0.0;

  const double snu = std::sqrt(dnu);
  const double ors = 1.0 - r * r;
  const double hrk = dh - r * dk;
  const double krh = dk - r * dh;
  double xnhk = 0.0, xnkh = 0.0;
  if (std::abs(hrk) + ors > 0.0) {
    xnhk = hrk * hrk / (hrk * hrk + ors * (dnu + dk * dk));
    xnkh = krh * krh / (krh * krh + ors * (dnu + dh * dh));
  }
  const double hs = hrk >= 0.0 ? 1.0 : -1.0;
  const double ks = krh >= 0.0 ? 1.0 : -1.0;

  double bvt;
  if (nu % 2 == 0) {
    bvt = std::atan2(std::sqrt(ors), -r) / tpi;
    double gmph = dh / std::sqrt(16.0 * (dnu + dh * dh));
    double gmpk = dk / std::sqrt(16.0 * (dnu + dk * dk));
    double btnckh = 2.0 * std::atan2(std::sqrt(xnkh), std::sqrt(1.0 - xnkh)) / pi;
    double btpdkh = 2.0 * std::sqrt(xnkh * (1.0 - xnkh)) / pi;
    double btnchk = 2.0 * std::atan2(std::sqrt(xnhk), std::sqrt(1.0 - xnhk)) / pi;
    double btpdhk = 2.0 * std::sqrt(xnhk * (1.0 - xnhk)) / pi;
    for (int j = 1; j <= nu / 2; ++j) {
      bvt += gmph * (1.0 + ks * btnckh);
      bvt += gmpk * (1.0 + hs * btnchk);
      btnckh += btpdkh;
      btpdkh = 2.0 * j * btpdkh * (1.0 - xnkh) / (2.0 * j + 1.0);
      btnchk += btpdhk;
      btpdhk = 2.0 * j * btpdhk * (1.0 - xnhk) / (2.0 * j + 1.0);
      gmph = gmph * (2.0 * j - 1.0) / (2.0 * j * (1.0 + dh * dh / dnu));
      gmpk = gmpk * (2.0 * j - 1.0) / (2.0 * j * (1.0 + dk * dk / dnu));
    }
  } else {
    const double qhrk = std::sqrt(dh * dh + dk * dk - 2.0 * r * dh * dk + dnu * ors);
    const double hkrn = dh * dk + r * dnu;
    const double hkn = dh * dk - dnu;
    const double hpk = dh + dk;
    bvt = std::atan2(-snu * (hkn * qhrk + hpk * hkrn), hkn * hkrn - dnu * hpk * qhrk) / tpi;
    if (bvt < -eps) bvt += 1.0;
    double gmph = dh / (tpi * snu * (1.0 + dh * dh / dnu));
    double gmpk = dk / (tpi * snu * (1.0 + dk * dk / dnu));
    double btnckh = std::sqrt(xnkh), btpdkh = btnckh;
    double btnchk = std::sqrt(xnhk), btpdhk = btnchk;
    for (int j = 1; j <= (nu - 1) / 2; ++j) {
      bvt += gmph * (1.0 + ks * btnckh);
      bvt += gmpk * (1.0 + hs * btnchk);
      btpdkh = (2.0 * j - 1.0) * btpdkh * (1.0 - xnkh) / (2.0 * j);
      btnckh += btpdkh;
      btpdhk = (2.0 * j - 1.0) * btpdhk * (1.0 - xnhk) / (2.0 * j);
      btnchk += btpdhk;
      gmph = 2.0 * j * gmph / ((2.0 * j + 1.0) * (1.0 + dh * dh / dnu));
      gmpk = 2.0 * j * gmpk / ((2.0 * j + 1.0) * (1.0 + dk * dk / dnu));
    }
  }
  return bvt;
}

bool is_small_integer(double nu) { return nu >= 1.0 && nu <= 200.0 && nu == std::floor(nu); }

}  // namespace

double bvt_cdf_quadrature(double h, double k, double rho, double nu) {
  if (h == -kInf || k == -kInf) return 0.0;
  if (h == kInf) return t_cdf(k, nu);
  if (k == kInf) return t_cdf(h, nu);
  // X ~ t_nu; given X = x, (Y - rho x) / sqrt((nu + x^2)(1 - rho^2)/(nu + 1)) ~ t_{nu+1}.
  const double s = (1.0 - rho * rho) / (nu + 1.0);
  auto f = [&](double x) {
    if (!std::isfinite(x)) return 0.0;
    return t_pdf(x, nu) * t_cdf((k - rho * x) / std::sqrt((nu + x * x) * s), nu + 1.0);
  };
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, -kInf, h, 20, 1e-10);
  return std::clamp(value, 0.0, 1.0);
}

double bvt_cdf(double h, double k, double rho, double nu) {
  if (h == -kInf || k == -kInf) return 0.0;
  if (h == kInf) return t_cdf(k, nu);
  if (k == kInf) return t_cdf(h, nu);
  if (!is_small_integer(nu)) return bvt_cdf_quadrature(h, k, rho, nu);
  return std::clamp(bvt_series(static_cast<int>(nu), h, k, rho), 0.0, 1.0);
}

}  // namespace ordcop
