#include "ordcop/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ordcop/errors.hpp"
#include "ordcop/inference.hpp"
#include "ordcop/special.hpp"
#include "ordcop/transforms.hpp"

namespace ordcop {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Objective wrapper: any exception or non-finite value becomes -inf so that the
// line search backtracks instead of aborting.
template <class F>
Objective guarded(F&& f) {
  return [f = std::forward<F>(f)](const Eigen::VectorXd& x) {
    try {
      const double v = f(x);
      return std::isfinite(v) ? v : kNegInf;
    } catch (const std::exception&) {
      return kNegInf;
    }
  };
}

std::vector<std::string> series_names(const OrdinalPanel& panel, int j, const SeriesModel& m) {
  std::vector<std::string> names;
  const std::string& r = panel.responses[j];
  for (int c : panel.series_columns[j]) names.push_back(r + ".beta[" + panel.covariates[c] + "]");
  for (int k = 1; k < m.marginal.K(); ++k) names.push_back(r + ".cut" + std::to_string(k));
  if (theta_free_size(m.temporal.family) == 1) names.push_back(r + ".theta");
  return names;
}

void fill_se(Estimates& est, const Objective& f, const Eigen::VectorXd& x, const ReportingMap& report) {
  try {
    const SeResult se = hessian_se(f, x, report);
    est.se = se.se;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-se.hessian, Eigen::EigenvaluesOnly);
    est.hessian_eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  } catch (const HessianNotNegativeDefinite& e) {
    est.se.resize(0);
    est.se_error = e.what();
    est.hessian_eigenvalues = e.eigenvalues;
  } catch (const std::exception& e) {
    est.se.resize(0);
    est.se_error = e.what();
  }
}

std::vector<double> theta_starts(const BivCopulaFamily& f) {
  std::vector<double> taus;
  switch (f.tag) {
    case Family::Gumbel:
    case Family::SurvivalGumbel:
      taus = {0.2, 0.5, 0.8};
      break;
    case Family::Independence:
      return {};
    default:
      taus = {-0.3, 0.2, 0.5, 0.8};
  }
  std::vector<double> out;
  for (double t : taus) out.push_back(theta_to_free(f, param_from_tau(f, t)));
  return out;
}

// Free value of theta at (or next to) independence, the point where step 1(b)
// reproduces the step 1(a) log-likelihood.
double independence_free(const BivCopulaFamily& f) {
  switch (f.tag) {
    case Family::Gumbel:
    case Family::SurvivalGumbel:
      return -40.0;
    default:
      return 0.0;
  }
}

SeriesFit fit_series_fixed_family(const OrdinalPanel& panel, int j, const SeriesModel& margins_a,
                                  const Eigen::VectorXd& free_a, double loglik_a, const BivCopulaFamily& family,
                                  const FitOptions& opt) {
  SeriesFit fit;
  fit.response = j;
  fit.loglik_a = loglik_a;
  SeriesModel like = margins_a;
  like.temporal = {family, 0.0};
  const int nt = theta_free_size(family);

  // 1(b): theta only.
  double theta_free = 0.0;
  fit.loglik_b = loglik_a;
  if (nt == 1) {
    auto obj_b = guarded([&](const Eigen::VectorXd& t) {
      SeriesModel m = like;
      m.temporal.theta = theta_from_free(family, t(0));
      return series_loglik(m, panel, j).value;
    });
    std::vector<double> starts = {independence_free(family)};
    for (double s : theta_starts(family)) starts.push_back(s);
    double best = kNegInf;
    for (double s : starts) {
      const double v = obj_b(Eigen::VectorXd::Constant(1, s));
      if (v > best) {
        best = v;
        theta_free = s;
      }
    }
    if (!std::isfinite(best)) throw NumericalError("step 1(b): log-likelihood not finite at any start");
    const OptimResult rb = quasi_newton_max(obj_b, Eigen::VectorXd::Constant(1, theta_free), opt.optimizer);
    theta_free = rb.argmax(0);
    fit.loglik_b = rb.value;
  }

  // 1(c): everything, started from the stacked (a, b) estimates.
  Eigen::VectorXd start = free_a;
  if (nt == 1) {
    start.conservativeResize(start.size() + 1);
    start(start.size() - 1) = theta_free;
  }
  auto obj_c = guarded([&](const Eigen::VectorXd& x) { return series_loglik(series_from_free(like, x), panel, j).value; });
  const OptimResult rc = quasi_newton_max(obj_c, start, opt.optimizer);
  if (nt == 0) fit.loglik_b = rc.value;
  fit.free = rc.argmax;
  fit.model = series_from_free(like, rc.argmax);
  fit.loglik_c = rc.value;
  fit.converged = rc.converged;
  fit.iterations = rc.iterations;
  fit.grad_norm = rc.grad_norm;
  fit.subject_terms = series_loglik(fit.model, panel, j).subject_terms;

  fit.estimates.names = series_names(panel, j, fit.model);
  fit.estimates.value = series_reporting(fit.model);
  if (opt.compute_se) {
    fill_se(fit.estimates, obj_c, rc.argmax,
            [&](const Eigen::VectorXd& x) { return series_reporting(series_from_free(like, x)); });
  }
  if (nt == 1) {
    fit.tau = kendall_tau(fit.model.temporal);
    if (fit.estimates.se.size() > 0) {
      const double th = fit.model.temporal.theta;
      const double se_th = fit.estimates.se(fit.estimates.se.size() - 1);
      const double h = 1e-5 * std::max(1.0, std::abs(th));
      auto tau_at = [&](double t) {
        BivCopulaSpec s = fit.model.temporal;
        s.theta = t;
        return kendall_tau(s);
      };
      double hi = th + h, lo = th - h;
      if (family.tag == Family::Gumbel || family.tag == Family::SurvivalGumbel) lo = std::max(lo, 1.0);
      if (family.tag == Family::BVN || family.tag == Family::BVT) hi = std::min(hi, 1.0 - 1e-12);
      fit.tau_se = std::abs((tau_at(hi) - tau_at(lo)) / (hi - lo)) * se_th;
    }
  }
  return fit;
}

}  // namespace

MarginalParams initial_marginal(const OrdinalPanel& panel, int j, Link link) {
  const int K = panel.K.at(j);
  std::vector<double> counts(K, 0.0);
  double total = 0.0;
  for (const auto& s : panel.subjects)
    for (const auto& r : s.records)
      if (r.y[j] != kMissing) {
        counts[r.y[j] - 1] += 1.0;
        total += 1.0;
      }
  if (total == 0.0) throw ValidationError("response " + panel.responses[j] + " has no observations");
  MarginalParams m;
  m.link = link;
  m.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(panel.series_columns[j].size()));
  m.cutpoints.resize(K - 1);
  double cum = 0.0;
  for (int k = 0; k < K - 1; ++k) {
    cum += counts[k];
    const double p = std::clamp(cum / total, 0.5 / total, 1.0 - 0.5 / total);
    double c = link_quantile(link, p);
    if (k > 0) c = std::max(c, m.cutpoints(k - 1) + 0.05);
    m.cutpoints(k) = c;
  }
  return m;
}

SeriesFit fit_step1(const OrdinalPanel& panel, int j, const BivCopulaFamily& family, Link link,
                    const std::vector<double>& nu_grid, const FitOptions& opt) {
  if (j < 0 || j >= panel.d()) throw DomainError("fit_step1: response index out of range");

  // 1(a)
  SeriesModel indep;
  indep.marginal = initial_marginal(panel, j, link);
  indep.temporal = {BivCopulaFamily::independence(), 0.0};
  auto obj_a = guarded([&](const Eigen::VectorXd& x) {
    return loglik_independent(series_from_free(indep, x).marginal, panel, j).value;
  });
  OptimResult ra;
  try {
    ra = quasi_newton_max(obj_a, series_to_free(indep), opt.optimizer);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("step 1(a) failed: ") + e.what());
  }
  const SeriesModel margins_a = series_from_free(indep, ra.argmax);

  std::vector<double> grid = nu_grid;
  if (family.tag != Family::BVT) grid = {family.nu};
  if (grid.empty()) throw DomainError("fit_step1: BVT needs a non-empty nu grid");

  SeriesFit best;
  bool have = false;
  std::vector<std::pair<double, double>> profile;
  for (double nu : grid) {
    BivCopulaFamily f = family;
    if (family.tag == Family::BVT) f.nu = nu;
    SeriesFit fit;
    try {
      fit = fit_series_fixed_family(panel, j, margins_a, ra.argmax, ra.value, f, opt);
    } catch (const std::exception& e) {
      throw NumericalError(std::string("step 1(b)/(c) failed: ") + e.what());
    }
    if (family.tag == Family::BVT) profile.emplace_back(nu, fit.loglik_c);
    if (!have || fit.loglik_c > best.loglik_c) {
      best = std::move(fit);
      have = true;
    }
  }
  best.nu_profile = std::move(profile);
  for (int k = 1; k <= panel.K[j]; ++k) {
    bool seen = false;
    for (const auto& s : panel.subjects) {
      for (const auto& r : s.records)
        if (r.y[j] == k) {
          seen = true;
          break;
        }
      if (seen) break;
    }
    if (!seen) best.empty_categories.push_back(k);
  }
  return best;
}

JointParams assemble(const std::vector<SeriesFit>& step1, const LinkCopula& link) {
  JointParams jp;
  for (const auto& f : step1) jp.series.push_back(f.model);
  jp.R = CorrelationMatrix::identity(static_cast<Eigen::Index>(step1.size()));
  jp.link = link;
  return jp;
}

std::vector<std::string> corr_names(const OrdinalPanel& panel) {
  std::vector<std::string> names;
  for (int a = 0; a < panel.d(); ++a)
    for (int b = a + 1; b < panel.d(); ++b) names.push_back("rho[" + panel.responses[a] + "," + panel.responses[b] + "]");
  return names;
}

namespace {

// Correlation of crude normal scores (quantiles of the marginal cell midpoints).
Eigen::MatrixXd normal_score_corr(const OrdinalPanel& panel, const JointParams& jp) {
  const int d = jp.d();
  std::vector<Eigen::VectorXd> rows;
  for (const auto& s : panel.subjects) {
    for (const auto& r : s.records) {
      Eigen::VectorXd z(d);
      bool ok = true;
      for (int j = 0; j < d && ok; ++j) {
        if (r.y[j] == kMissing) {
          ok = false;
          break;
        }
        const auto& m = jp.series[j].marginal;
        const CdfPair b = ordinal_bounds(m, r.y[j], eta_of(m, r.x[j]));
        z(j) = norm_quantile(std::clamp(0.5 * (b.lo + b.hi), 1e-12, 1.0 - 1e-12));
      }
      if (ok) rows.push_back(z);
    }
  }
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(d, d);
  if (rows.size() < 3) return R;
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) Z.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  Z.rowwise() -= Z.colwise().mean();
  Eigen::MatrixXd C = Z.transpose() * Z;
  const Eigen::VectorXd sd = C.diagonal().cwiseSqrt();
  if ((sd.array() <= 0.0).any()) return R;
  C = sd.cwiseInverse().asDiagonal() * C * sd.cwiseInverse().asDiagonal();
  for (double w = 1.0; w > 0.0; w -= 0.1) {
    Eigen::MatrixXd M = w * C + (1.0 - w) * R;
    M.diagonal().setOnes();
    if (Eigen::LLT<Eigen::MatrixXd>(M).info() == Eigen::Success && M.cwiseAbs().maxCoeff() <= 1.0 &&
        (M - R).cwiseAbs().maxCoeff() < 0.99)
      return M;
  }
  return R;
}

}  // namespace

JointFit fit_step2(const OrdinalPanel& panel, const std::vector<SeriesFit>& step1, const LinkCopula& link,
                   const QmcConfig& cfg, const FitOptions& opt) {
  if (static_cast<int>(step1.size()) != panel.d()) throw DomainError("fit_step2: need one step-1 fit per response");
  JointParams base = assemble(step1, link);
  const int d = base.d();
  JointFit fit;
  fit.stage = "step2";
  fit.plan = std::make_shared<const OrderingPlan>(make_ordering_plan(base, panel, opt.threads));
  const OrderingPlan* plan = fit.plan.get();
  auto obj = guarded([&](const Eigen::VectorXd& a) {
    JointParams jp = base;
    jp.R = CorrelationMatrix(corr_from_free(a, d));
    return joint_loglik(jp, panel, cfg, opt.threads, plan).value;
  });
  const Eigen::VectorXd a0 = Eigen::VectorXd::Zero(corr_free_size(d));
  fit.loglik_identity = obj(a0);
  Eigen::VectorXd start = a0;
  fit.loglik_start = fit.loglik_identity;
  try {
    const Eigen::VectorXd a1 = corr_to_free(normal_score_corr(panel, base));
    const double v1 = obj(a1);
    if (v1 > fit.loglik_start) {
      start = a1;
      fit.loglik_start = v1;
    }
  } catch (const std::exception&) {
  }
  OptimResult r;
  try {
    r = quasi_newton_max(obj, start, opt.optimizer);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("step 2 failed: ") + e.what());
  }
  fit.params = base;
  fit.params.R = CorrelationMatrix(corr_from_free(r.argmax, d));
  fit.free = r.argmax;
  const LogLik ll = joint_loglik(fit.params, panel, cfg, opt.threads, plan);
  fit.loglik = ll.value;
  fit.loglik_std_error = ll.std_error;
  fit.subject_terms = ll.subject_terms;
  fit.converged = r.converged;
  fit.iterations = r.iterations;
  fit.grad_norm = r.grad_norm;
  fit.estimates.names = corr_names(panel);
  fit.estimates.value = corr_offdiag(fit.params.R.matrix());
  if (opt.compute_se)
    fill_se(fit.estimates, obj, r.argmax, [d](const Eigen::VectorXd& a) { return corr_offdiag(corr_from_free(a, d)); });
  return fit;
}

std::vector<JointFit> fit_step2(const OrdinalPanel& panel, const std::vector<SeriesFit>& step1,
                                const std::vector<LinkCopula>& links, const QmcConfig& cfg, const FitOptions& opt) {
  if (links.empty()) throw DomainError("fit_step2: link-copula grid is empty");
  std::vector<JointFit> out;
  for (const auto& l : links) out.push_back(fit_step2(panel, step1, l, cfg, opt));
  return out;
}

JointFit fit_step3(const OrdinalPanel& panel, const JointFit& step2, const QmcConfig& cfg, const FitOptions& opt) {
  const JointParams& base = step2.params;
  const int d = base.d();
  std::vector<int> sizes;
  int total = corr_free_size(d);
  for (const auto& m : base.series) {
    sizes.push_back(series_free_size(m));
    total += sizes.back();
  }
  if (total > opt.max_free_params && !opt.force_step3)
    throw DomainError("step 3 refused: " + std::to_string(total) + " free parameters exceed the cap of " +
                      std::to_string(opt.max_free_params));

  auto unpack = [&](const Eigen::VectorXd& x) {
    JointParams jp = base;
    Eigen::Index off = 0;
    for (int j = 0; j < d; ++j) {
      jp.series[j] = series_from_free(base.series[j], x.segment(off, sizes[j]));
      off += sizes[j];
    }
    jp.R = CorrelationMatrix(corr_from_free(x.tail(corr_free_size(d)), d));
    return jp;
  };
  Eigen::VectorXd start(total);
  Eigen::Index off = 0;
  for (int j = 0; j < d; ++j) {
    start.segment(off, sizes[j]) = series_to_free(base.series[j]);
    off += sizes[j];
  }
  start.tail(corr_free_size(d)) = step2.free;
  JointFit fit;
  fit.stage = "step3";
  fit.plan = step2.plan ? step2.plan : std::make_shared<const OrderingPlan>(make_ordering_plan(base, panel, opt.threads));
  const OrderingPlan* plan = fit.plan.get();
  auto obj = guarded(
      [&](const Eigen::VectorXd& x) { return joint_loglik(unpack(x), panel, cfg, opt.threads, plan).value; });

  fit.loglik_identity = step2.loglik_identity;
  fit.loglik_start = obj(start);
  OptimResult r;
  try {
    r = quasi_newton_max(obj, start, opt.optimizer);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("step 3 failed: ") + e.what());
  }
  fit.params = unpack(r.argmax);
  fit.free = r.argmax;
  const LogLik ll = joint_loglik(fit.params, panel, cfg, opt.threads, plan);
  fit.loglik = ll.value;
  fit.loglik_std_error = ll.std_error;
  fit.subject_terms = ll.subject_terms;
  fit.converged = r.converged;
  fit.iterations = r.iterations;
  fit.grad_norm = r.grad_norm;

  auto report = [&](const Eigen::VectorXd& x) {
    const JointParams jp = unpack(x);
    std::vector<Eigen::VectorXd> parts;
    Eigen::Index n = 0;
    for (const auto& m : jp.series) {
      parts.push_back(series_reporting(m));
      n += parts.back().size();
    }
    const Eigen::VectorXd rho = corr_offdiag(jp.R.matrix());
    Eigen::VectorXd v(n + rho.size());
    Eigen::Index o = 0;
    for (const auto& p : parts) {
      v.segment(o, p.size()) = p;
      o += p.size();
    }
    v.tail(rho.size()) = rho;
    return v;
  };
  for (int j = 0; j < d; ++j)
    for (auto& nm : series_names(panel, j, fit.params.series[j])) fit.estimates.names.push_back(nm);
  for (auto& nm : corr_names(panel)) fit.estimates.names.push_back(nm);
  fit.estimates.value = report(r.argmax);
  if (opt.compute_se) fill_se(fit.estimates, obj, r.argmax, report);
  return fit;
}

}  // namespace ordcop
