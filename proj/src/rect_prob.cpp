#include "ordcop/rect_prob.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "lattice.hpp"
#include "ordcop/errors.hpp"
#include "ordcop/special.hpp"

namespace ordcop {

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw DomainError("correlation matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    if (std::abs(m_(i, i) - 1.0) > 1e-12) throw DomainError("correlation matrix needs unit diagonal");
    m_(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(m_(i, j) - m_(j, i)) > 1e-12) throw DomainError("correlation matrix must be symmetric");
      m_(j, i) = m_(i, j);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m_);
  if (llt.info() != Eigen::Success) throw DecompositionError("correlation matrix is not positive definite");
}

CorrelationMatrix CorrelationMatrix::identity(Eigen::Index d) {
  return CorrelationMatrix(Eigen::MatrixXd::Identity(d, d));
}

CorrelationMatrix CorrelationMatrix::exchangeable(Eigen::Index d, double rho) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, rho);
  m.diagonal().setOnes();
  return CorrelationMatrix(std::move(m));
}

void validate(const QmcConfig& cfg) {
  if (cfg.shifts < 2) throw DomainError("qmc: shifts must be >= 2");
  if (cfg.points_per_shift < 1) throw DomainError("qmc: points_per_shift must be >= 1");
  if (cfg.max_dim < 1) throw DomainError("qmc: max_dim must be >= 1");
}

namespace {

// Reordered, scaled Cholesky problem: integrate over a_i <= sum_k L(i,k) y_k + y_i <= b_i
// with the diagonal divided out.
struct Prepared {
  int d = 0;
  std::vector<double> a, b;  // standardised limits
  Eigen::MatrixXd L;         // strictly lower part used, unit diagonal implied
};

enum class Trivial { None, Zero, One };

struct Reduced {
  Trivial trivial = Trivial::None;
  Eigen::VectorXd lower, upper;
  Eigen::MatrixXd R;
  std::vector<Eigen::Index> keep;  // original index of each retained coordinate
};

// Removes coordinates integrated over the whole line; detects empty rectangles.
Reduced reduce(const Rectangle& rect, const CorrelationMatrix& R) {
  if (rect.lower.size() != rect.upper.size()) throw DomainError("rectangle: lower/upper length mismatch");
  if (rect.dim() != R.dim()) throw DomainError("rectangle dimension does not match correlation matrix");
  Reduced out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < rect.dim(); ++i) {
    const double lo = rect.lower(i), hi = rect.upper(i);
    if (std::isnan(lo) || std::isnan(hi)) throw DomainError("rectangle limits must not be NaN");
    if (lo > hi) throw DomainError("rectangle: lower limit exceeds upper limit");
    if (lo == hi) {
      out.trivial = Trivial::Zero;
      return out;
    }
    if (lo == -kInf && hi == kInf) continue;
    keep.push_back(i);
  }
  if (keep.empty()) {
    out.trivial = Trivial::One;
    return out;
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  out.keep = keep;
  out.lower.resize(m);
  out.upper.resize(m);
  out.R.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.lower(i) = rect.lower(keep[i]);
    out.upper(i) = rect.upper(keep[i]);
    for (Eigen::Index j = 0; j < m; ++j) out.R(i, j) = R(keep[i], keep[j]);
  }
  return out;
}

double truncated_mean(double a, double b) {
  const double p = norm_interval(a, b);
  if (p > 1e-300) return (norm_pdf(a) - norm_pdf(b)) / p;
  if (a == -kInf) return b;
  if (b == kInf) return a;
  return 0.5 * (a + b);
}

// Genz-Bretz: at each step pick the remaining variable whose conditional interval
// has the smallest probability, then extend the Cholesky factor by that column.
// With `rank` (one entry per retained coordinate) the order is fixed instead:
// lowest rank first.
Prepared prepare(const Reduced& red, std::vector<int>* chosen = nullptr, const std::vector<int>* rank = nullptr) {
  const int n = static_cast<int>(red.R.rows());
  Eigen::MatrixXd C = red.R;
  std::vector<double> a(red.lower.data(), red.lower.data() + n);
  std::vector<double> b(red.upper.data(), red.upper.data() + n);
  std::vector<double> y(n, 0.0);
  std::vector<int> idx(n), rk(n, 0);
  for (int i = 0; i < n; ++i) {
    idx[i] = i;
    if (rank) rk[i] = (*rank)[i];
  }

  for (int i = 0; i < n; ++i) {
    int best = i;
    double best_p = kInf, best_a = 0.0, best_b = 0.0;
    for (int j = i; j < n; ++j) {
      double s = C(j, j);
      double mu = 0.0;
      for (int k = 0; k < i; ++k) {
        s -= C(j, k) * C(j, k);
        mu += C(j, k) * y[k];
      }
      if (s <= 1e-14) throw DecompositionError("correlation matrix is numerically singular");
      const double den = std::sqrt(s);
      const double aj = (a[j] - mu) / den, bj = (b[j] - mu) / den;
      const double p = rank ? static_cast<double>(rk[j]) : norm_interval(aj, bj);
      if (p < best_p) {
        best_p = p;
        best = j;
        best_a = aj;
        best_b = bj;
      }
    }
    if (best != i) {
      std::swap(a[i], a[best]);
      std::swap(b[i], b[best]);
      std::swap(idx[i], idx[best]);
      std::swap(rk[i], rk[best]);
      C.row(i).swap(C.row(best));
      C.col(i).swap(C.col(best));
    }
    double s = C(i, i);
    for (int k = 0; k < i; ++k) s -= C(i, k) * C(i, k);
    const double lii = std::sqrt(s);
    C(i, i) = lii;
    for (int r = i + 1; r < n; ++r) {
      double v = C(r, i);
      for (int k = 0; k < i; ++k) v -= C(r, k) * C(i, k);
      C(r, i) = v / lii;
    }
    y[i] = truncated_mean(best_a, best_b);
  }

  if (chosen) chosen->assign(idx.begin(), idx.end());
  Prepared p;
  p.d = n;
  p.a.resize(n);
  p.b.resize(n);
  p.L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double lii = C(i, i);
    p.a[i] = a[i] / lii;
    p.b[i] = b[i] / lii;
    for (int k = 0; k < i; ++k) p.L(i, k) = C(i, k) / lii;
  }
  return p;
}

// Phi over [lo, hi] evaluated on the tail that avoids cancellation. Returns the
// width and writes the lower-tail anchor needed to invert a point inside it.
inline double interval_anchor(double lo, double hi, bool& upper, double& anchor) {
  if (lo > 0.0) {
    upper = true;
    anchor = norm_sf(lo);
    return anchor - (hi == kInf ? 0.0 : norm_sf(hi));
  }
  upper = false;
  anchor = lo == -kInf ? 0.0 : norm_cdf(lo);
  return (hi == kInf ? 1.0 : norm_cdf(hi)) - anchor;
}

// Sequential conditioning integrand. w holds d - 1 coordinates; scale multiplies
// the limits (radial variable of the t mixture, 1 for the normal case).
double integrand(const Prepared& p, const double* w, double scale, bool flip, double* ybuf) {
  constexpr double tiny = std::numeric_limits<double>::min();
  const double one_minus = std::nextafter(1.0, 0.0);
  double lo = p.a[0] * scale, hi = p.b[0] * scale;
  bool upper;
  double anchor;
  double width = interval_anchor(lo, hi, upper, anchor);
  double f = width;
  for (int i = 1; i < p.d && f > 0.0; ++i) {
    const double wi = flip ? 1.0 - w[i - 1] : w[i - 1];
    double yi;
    if (upper) {
      yi = -norm_quantile(std::max(anchor - wi * width, tiny));
    } else {
      yi = norm_quantile(std::clamp(anchor + wi * width, tiny, one_minus));
    }
    ybuf[i - 1] = yi;
    double mu = 0.0;
    for (int k = 0; k < i; ++k) mu += p.L(i, k) * ybuf[k];
    lo = p.a[i] * scale - mu;
    hi = p.b[i] * scale - mu;
    width = interval_anchor(lo, hi, upper, anchor);
    f *= std::max(width, 0.0);
  }
  return f;
}

RectProbability integrate(const Prepared& p, const QmcConfig& cfg, double nu) {
  const bool student = nu > 0.0;
  const int qdim = p.d - 1 + (student ? 1 : 0);
  if (qdim > cfg.max_dim) throw DomainError("rectangle dimension exceeds qmc max_dim");
  const auto ps = detail::point_set(cfg, std::max(qdim, 1));
  std::shared_ptr<const std::vector<double>> radial;
  if (student) radial = detail::radial_values(cfg, std::max(qdim, 1), nu);
  const int offset = student ? 1 : 0;

  std::vector<double> ybuf(static_cast<std::size_t>(p.d), 0.0);
  std::vector<double> per_shift(cfg.shifts);
  for (int s = 0; s < cfg.shifts; ++s) {
    double sum = 0.0;
    for (int k = 0; k < cfg.points_per_shift; ++k) {
      const double* w = ps->point(s, k) + offset;
      double r0 = 1.0, r1 = 1.0;
      if (student) {
        const std::size_t idx = 2 * (static_cast<std::size_t>(s) * cfg.points_per_shift + k);
        r0 = (*radial)[idx];
        r1 = (*radial)[idx + 1];
      }
      sum += integrand(p, w, r0, false, ybuf.data()) + integrand(p, w, r1, true, ybuf.data());
    }
    per_shift[s] = sum / (2.0 * cfg.points_per_shift);
  }
  double mean = 0.0;
  for (double v : per_shift) mean += v;
  mean /= cfg.shifts;
  double ss = 0.0;
  for (double v : per_shift) ss += (v - mean) * (v - mean);
  return {std::clamp(mean, 0.0, 1.0), std::sqrt(ss / (cfg.shifts * (cfg.shifts - 1.0)))};
}

RectProbability rect_common(const Rectangle& rect, const CorrelationMatrix& R, double nu,
                            const QmcConfig& cfg, std::span<const int> order) {
  validate(cfg);
  const Reduced red = reduce(rect, R);
  if (red.trivial == Trivial::Zero) return {0.0, 0.0};
  if (red.trivial == Trivial::One) return {1.0, 0.0};
  if (red.R.rows() == 1) {
    const double lo = red.lower(0), hi = red.upper(0);
    if (nu > 0.0) return {std::max(0.0, t_cdf(hi, nu) - t_cdf(lo, nu)), 0.0};
    return {norm_interval(lo, hi), 0.0};
  }
  if (order.empty()) return integrate(prepare(red), cfg, nu);
  // Coordinates absent from `order` go last, in their natural order.
  const auto d = static_cast<int>(rect.dim());
  std::vector<int> pos(d);
  for (int i = 0; i < d; ++i) pos[i] = d + i;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] < 0 || order[k] >= d) throw DomainError("variable order index out of range");
    pos[order[k]] = static_cast<int>(k);
  }
  std::vector<int> rank(red.keep.size());
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = pos[red.keep[i]];
  return integrate(prepare(red, nullptr, &rank), cfg, nu);
}

}  // namespace

RectProbability mvn_rect(const Rectangle& rect, const CorrelationMatrix& R, const QmcConfig& cfg,
                         std::span<const int> order) {
  return rect_common(rect, R, 0.0, cfg, order);
}

RectProbability mvt_rect(const Rectangle& rect, const CorrelationMatrix& R, double nu,
                         const QmcConfig& cfg, std::span<const int> order) {
  if (!(nu > 0.0)) throw DomainError("mvt_rect: nu must be > 0");
  return rect_common(rect, R, nu, cfg, order);
}

std::vector<int> rect_variable_order(const Rectangle& rect, const CorrelationMatrix& R) {
  const Reduced red = reduce(rect, R);
  if (red.trivial != Trivial::None) return {};
  std::vector<int> chosen;
  prepare(red, &chosen);
  std::vector<int> out(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) out[i] = static_cast<int>(red.keep[chosen[i]]);
  return out;
}

double mvn_rect_exchangeable(const Rectangle& rect, double rho, double quad_tol) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("mvn_rect_exchangeable: rho must lie in (0, 1)");
  if (rect.lower.size() != rect.upper.size() || rect.dim() == 0)
    throw DomainError("rectangle: lower/upper length mismatch");
  for (Eigen::Index i = 0; i < rect.dim(); ++i) {
    if (rect.lower(i) > rect.upper(i)) throw DomainError("rectangle: lower limit exceeds upper limit");
    if (rect.lower(i) == rect.upper(i)) return 0.0;
  }
  const double sr = std::sqrt(rho), sc = std::sqrt(1.0 - rho);
  auto f = [&](double z) {
    if (!std::isfinite(z)) return 0.0;
    double prod = norm_pdf(z);
    for (Eigen::Index j = 0; j < rect.dim() && prod > 0.0; ++j)
      prod *= norm_interval((rect.lower(j) - sr * z) / sc, (rect.upper(j) - sr * z) / sc);
    return prod;
  };
  // Relative tolerance against the L1 norm; the integrand is non-negative with
  // mass <= 1, so the absolute error stays below quad_tol.
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -kInf, kInf, 25, quad_tol);
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace ordcop
