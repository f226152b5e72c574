#include "ordcop/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ordcop/errors.hpp"
#include "ordcop/special.hpp"

namespace ordcop {

using nlohmann::json;
using nlohmann::ordered_json;

FitRun run_fit(const ModelConfig& cfg, const OrdinalPanel& panel) {
  const FitOptions opt = fit_options(cfg);
  FitRun run;
  for (int j = 0; j < cfg.d(); ++j) {
    const auto& r = cfg.responses[j];
    run.step1.push_back(fit_step1(panel, j, r.family, r.link, r.nu_grid, opt));
  }
  if (cfg.stage >= 2) {
    run.step2 = fit_step2(panel, run.step1, cfg.link_grid, cfg.qmc, opt);
    run.selected_link = 0;
    for (std::size_t k = 1; k < run.step2.size(); ++k)
      if (run.step2[k].loglik > run.step2[run.selected_link].loglik) run.selected_link = static_cast<int>(k);
  }
  if (cfg.stage >= 3) run.step3 = fit_step3(panel, run.step2[run.selected_link], cfg.qmc, opt);
  return run;
}

namespace {

ordered_json parameter_table(const Estimates& e) {
  ordered_json rows = ordered_json::array();
  for (std::size_t k = 0; k < e.names.size(); ++k) {
    ordered_json r;
    r["name"] = e.names[k];
    r["estimate"] = e.value(k);
    if (e.se.size() > 0 && e.se(k) > 0.0) {
      const WaldResult w = wald_test(e.value(k), e.se(k));
      r["se"] = e.se(k);
      r["z"] = w.z;
      r["p"] = w.p_value;
    } else {
      r["se"] = nullptr;
      r["z"] = nullptr;
      r["p"] = nullptr;
    }
    rows.push_back(r);
  }
  return rows;
}

void se_diagnostics(ordered_json& o, const Estimates& e) {
  if (!e.se_error.empty()) o["se_error"] = e.se_error;
  o["hessian_eigenvalues"] = e.hessian_eigenvalues;
}

ordered_json joint_json(const JointFit& f) {
  ordered_json o;
  o["stage"] = f.stage;
  o["link"] = f.params.link.name();
  o["loglik"] = f.loglik;
  o["loglik_qmc_se"] = f.loglik_std_error;
  o["loglik_at_identity"] = f.loglik_identity;
  o["loglik_at_start"] = f.loglik_start;
  o["converged"] = f.converged;
  o["iterations"] = f.iterations;
  o["grad_norm"] = f.grad_norm;
  o["parameters"] = parameter_table(f.estimates);
  se_diagnostics(o, f.estimates);
  return o;
}

}  // namespace

ordered_json fit_report(const ModelConfig& cfg, const OrdinalPanel& panel, const FitRun& run) {
  ordered_json rep;
  rep["tool"] = "ordcop";
  rep["seed"] = cfg.qmc.seed;
  rep["config"] = config_echo(cfg);
  rep["panel"] = {{"subjects", panel.n()}, {"observations", panel.observations()}, {"responses", panel.d()}};

  ordered_json s1 = ordered_json::array();
  for (const auto& f : run.step1) {
    ordered_json o;
    o["response"] = panel.responses[f.response];
    o["family"] = family_name(f.model.temporal.family);
    if (f.model.temporal.family.tag == Family::BVT) {
      o["nu"] = f.model.temporal.family.nu;
      ordered_json prof = ordered_json::array();
      for (const auto& [nu, ll] : f.nu_profile) prof.push_back({{"nu", nu}, {"loglik", ll}});
      o["nu_profile"] = prof;
    }
    o["link"] = link_name(f.model.marginal.link);
    o["loglik"] = {{"step1a", f.loglik_a}, {"step1b", f.loglik_b}, {"step1c", f.loglik_c}};
    o["tau"] = f.tau;
    o["tau_se"] = f.tau_se;
    o["converged"] = f.converged;
    o["iterations"] = f.iterations;
    o["grad_norm"] = f.grad_norm;
    o["weakly_identified_categories"] = f.empty_categories;
    o["parameters"] = parameter_table(f.estimates);
    se_diagnostics(o, f.estimates);
    s1.push_back(o);
  }
  rep["step1"] = s1;

  ordered_json fin;
  std::vector<std::string> ids;
  for (const auto& s : panel.subjects) ids.push_back(s.id);
  if (!run.step2.empty()) {
    ordered_json s2 = ordered_json::array();
    for (const auto& f : run.step2) s2.push_back(joint_json(f));
    rep["step2"] = s2;
    rep["selected_link"] = run.step2[run.selected_link].params.link.name();
  }
  if (run.step3) rep["step3"] = joint_json(*run.step3);

  if (run.step3) {
    fin["stage"] = "step3";
    fin["loglik"] = run.step3->loglik;
    fin["subject_terms"] = run.step3->subject_terms;
  } else if (!run.step2.empty()) {
    fin["stage"] = "step2";
    fin["loglik"] = run.step2[run.selected_link].loglik;
    fin["subject_terms"] = run.step2[run.selected_link].subject_terms;
  } else {
    fin["stage"] = "step1";
    std::vector<double> terms(panel.n(), 0.0);
    double total = 0.0;
    for (const auto& f : run.step1) {
      total += f.loglik_c;
      for (std::size_t i = 0; i < terms.size(); ++i) terms[i] += f.subject_terms[i];
    }
    fin["loglik"] = total;
    fin["subject_terms"] = terms;
  }
  fin["subject_ids"] = ids;
  rep["final"] = fin;
  return rep;
}

VuongResult vuong_from_reports(const json& a, const json& b) {
  try {
    const auto& fa = a.at("final");
    const auto& fb = b.at("final");
    if (fa.at("subject_ids") != fb.at("subject_ids"))
      throw ValidationError("vuong: the two reports cover different subjects");
    const auto ta = fa.at("subject_terms").get<std::vector<double>>();
    const auto tb = fb.at("subject_terms").get<std::vector<double>>();
    return vuong_test(ta, tb);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("vuong: malformed fit report: ") + e.what());
  }
}

ordered_json vuong_report(const VuongResult& v) {
  ordered_json o;
  o["z0"] = v.z0;
  o["p_value"] = v.p_value;
  o["d_bar"] = v.d_bar;
  o["s"] = v.s;
  o["N"] = v.N;
  o["favours"] = v.z0 > 0.0 ? "model2" : (v.z0 < 0.0 ? "model1" : "neither");
  return o;
}

ordered_json asymptotics_report(const std::vector<AsymRow>& rows, const QmcConfig& cfg) {
  ordered_json rep;
  rep["qmc"] = {{"seed", cfg.seed}, {"shifts", cfg.shifts}, {"points_per_shift", cfg.points_per_shift}};
  rep["covariate_support"] = {{"values", {0.0, 1.0}}, {"mass", {0.5, 0.5}}};
  ordered_json arr = ordered_json::array();
  double worst = 0.0;
  auto params = [](const LimitEstimate& e) {
    ordered_json o;
    o["beta"] = e.params.beta;
    o["cutpoints"] = std::vector<double>(e.params.cutpoints.data(), e.params.cutpoints.data() + e.params.cutpoints.size());
    o["rho"] = e.params.rho;
    o["value"] = e.value;
    o["converged"] = e.converged;
    o["iterations"] = e.iterations;
    return o;
  };
  for (const auto& r : rows) {
    ordered_json o;
    o["d"] = r.design.d;
    o["K"] = r.design.K;
    o["rho"] = r.design.rho;
    o["beta"] = r.design.beta;
    o["cutpoints"] = std::vector<double>(r.design.cutpoints.data(), r.design.cutpoints.data() + r.design.cutpoints.size());
    o["cases"] = r.cases;
    o["mle"] = params(r.mle);
    o["msle"] = params(r.msle);
    o["max_gap"] = r.max_gap;
    arr.push_back(o);
    worst = std::max(worst, r.max_gap);
  }
  rep["designs"] = arr;
  rep["max_gap"] = worst;
  return rep;
}

Eigen::VectorXd density_grid_axis(int grid_n, double zmax) {
  if (grid_n < 2) throw DomainError("density grid needs at least 2 points per axis");
  return Eigen::VectorXd::LinSpaced(grid_n, -zmax, zmax);
}

Eigen::MatrixXd emit_density_grid(const BivCopulaSpec& spec, int grid_n, double zmax, double delta) {
  validate(spec);
  const Eigen::VectorXd z = density_grid_axis(grid_n, zmax);
  Eigen::VectorXd lo(grid_n), hi(grid_n);
  for (int k = 0; k < grid_n; ++k) {
    lo(k) = norm_cdf(z(k) - delta);
    hi(k) = norm_cdf(z(k) + delta);
  }
  Eigen::MatrixXd g(grid_n, grid_n);
  for (int a = 0; a < grid_n; ++a)
    for (int b = 0; b < grid_n; ++b) g(a, b) = biv_pmf_rect(spec, lo(a), hi(a), lo(b), hi(b)) / (4.0 * delta * delta);
  return g;
}

void write_density_grid_csv(const Eigen::MatrixXd& grid, double zmax, std::ostream& out) {
  const Eigen::VectorXd z = density_grid_axis(static_cast<int>(grid.rows()), zmax);
  out << "z1,z2,density\n";
  char buf[96];
  for (Eigen::Index a = 0; a < grid.rows(); ++a)
    for (Eigen::Index b = 0; b < grid.cols(); ++b) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.17g\n", z(a), z(b), grid(a, b));
      out << buf;
    }
}

}  // namespace ordcop
