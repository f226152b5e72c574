#include "ordcop/optimize.hpp"

#include <cmath>

#include "ordcop/errors.hpp"

namespace ordcop {

Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x, double fx,
                                 const OptimizerOptions& opt, Eigen::VectorXd* curvature, int* evaluations) {
  const auto n = x.size();
  Eigen::VectorXd g(n);
  if (curvature) curvature->resize(n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = std::max(opt.step_min, opt.step_rel * std::abs(x(i)));
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    if (evaluations) *evaluations += 2;
    const bool okp = std::isfinite(fp), okm = std::isfinite(fm);
    if (okp && okm) {
      g(i) = (fp - fm) / (2.0 * h);
    } else if (okp) {
      g(i) = (fp - fx) / h;
    } else if (okm) {
      g(i) = (fx - fm) / h;
    } else {
      g(i) = 0.0;
    }
    if (curvature) (*curvature)(i) = okp && okm ? (fp - 2.0 * fx + fm) / (h * h) : 0.0;
  }
  return g;
}

namespace {

Eigen::MatrixXd diagonal_start(const Eigen::VectorXd& curv, const Eigen::VectorXd& g) {
  const auto n = curv.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  const double fallback = 1.0 / std::max(1.0, g.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) H(i, i) = curv(i) < -1e-8 ? 1.0 / -curv(i) : fallback;
  return H;
}

}  // namespace

OptimResult quasi_newton_max(const Objective& f, const Eigen::VectorXd& init, const OptimizerOptions& opt,
                             const Eigen::MatrixXd* init_inv_hessian) {
  OptimResult res;
  Eigen::VectorXd x = init;
  double fx = f(x);
  res.evaluations = 1;
  if (!std::isfinite(fx)) throw NumericalError("optimizer: objective is not finite at the initial point");
  const auto n = x.size();
  if (n == 0) {
    res.argmax = x;
    res.value = fx;
    res.converged = true;
    res.message = "no free parameters";
    return res;
  }

  Eigen::VectorXd curv;
  Eigen::VectorXd g = central_gradient(f, x, fx, opt, &curv, &res.evaluations);
  Eigen::MatrixXd H = init_inv_hessian ? *init_inv_hessian : diagonal_start(curv, g);
  bool fresh = init_inv_hessian == nullptr;

  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (g.cwiseAbs().maxCoeff() < opt.tol) {
      res.converged = true;
      res.message = "gradient below tolerance";
      break;
    }
    Eigen::VectorXd p = H * g;
    double slope = g.dot(p);
    if (!(slope > 0.0)) {
      H = diagonal_start(curv, g);
      fresh = true;
      p = H * g;
      slope = g.dot(p);
    }
    double alpha = 1.0;
    double best_alpha = 0.0, best_f = fx;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      const double ft = f(x + alpha * p);
      ++res.evaluations;
      if (!std::isfinite(ft)) continue;
      if (ft >= fx + 1e-4 * alpha * slope) {
        best_alpha = alpha;
        best_f = ft;
        accepted = true;
        break;
      }
      if (ft > best_f) {
        best_f = ft;
        best_alpha = alpha;
      }
    }
    if (!accepted && best_alpha > 0.0) accepted = true;
    if (!accepted) {
      if (!fresh) {
        H = diagonal_start(curv, g);
        fresh = true;
        continue;
      }
      // No representable ascent along the search direction: the objective is
      // flat to rounding. Accept when the gradient is small relative to |f|.
      res.converged = g.cwiseAbs().maxCoeff() < opt.tol * std::max(1.0, std::abs(fx));
      res.message = res.converged ? "stationary to rounding precision" : "line search failed";
      break;
    }
    const Eigen::VectorXd s = best_alpha * p;
    const double gain = best_f - fx;
    x += s;
    fx = best_f;
    const Eigen::VectorXd g_new = central_gradient(f, x, fx, opt, &curv, &res.evaluations);
    const Eigen::VectorXd y = g - g_new;  // gradient change of -f
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
      fresh = false;
    }
    g = g_new;
    const double scale = std::max(1.0, std::abs(fx));
    if (gain <= 1e-13 * scale && g.cwiseAbs().maxCoeff() < opt.tol * scale) {
      ++it;
      res.converged = true;
      res.message = "stationary to rounding precision";
      break;
    }
  }
  if (res.message.empty()) {
    res.converged = g.cwiseAbs().maxCoeff() < opt.tol;
    res.message = res.converged ? "gradient below tolerance" : "iteration limit reached";
  }
  res.argmax = x;
  res.value = fx;
  res.inv_hessian = H;
  res.gradient = g;
  res.iterations = it;
  res.grad_norm = g.cwiseAbs().maxCoeff();
  return res;
}

}  // namespace ordcop
