#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "ordcop/errors.hpp"
#include "ordcop/io.hpp"
#include "ordcop/report.hpp"
#include "ordcop/special.hpp"

using namespace ordcop;
using nlohmann::json;
using doctest::Approx;

namespace {

const char* kConfig = R"({
  "responses": [
    {"name": "a", "K": 3, "covariates": ["x"], "family": "frank"},
    {"name": "b", "K": 6, "covariates": ["x", "w"], "family": "gumbel"}
  ],
  "qmc": {"seed": 3, "shifts": 4, "points_per_shift": 64},
  "stage": 2,
  "simulation": {
    "n": 60, "T": 3, "seed": 5, "link": "mvn",
    "R": [[1, 0.3], [0.3, 1]],
    "covariates": [{"name": "x", "kind": "normal"}, {"name": "w", "kind": "bernoulli", "param": 0.4, "time_varying": false}],
    "truth": [{"beta": [0.4], "cutpoints": [-0.5, 0.5], "theta": 3.0},
              {"beta": [0.2, -0.3], "cutpoints": [-1.2, -0.5, 0.0, 0.5, 1.1], "theta": 1.5}]
  }
})";

ModelConfig config() { return parse_config(json::parse(kConfig)); }

OrdinalPanel csv(const std::string& text, const ModelConfig& cfg) {
  std::istringstream in(text);
  return parse_panel_csv(in, cfg);
}

}  // namespace

TEST_CASE("panel CSV examples") {
  const ModelConfig cfg = config();
  const auto p = csv("subject_id,time,a,b,x,w\n7,1,1,2,0.5,1\n7,2,3,NA,-0.1,1\n", cfg);
  CHECK(p.n() == 1);
  REQUIRE(p.subjects[0].records.size() == 2);
  CHECK(p.subjects[0].records[1].y[1] == kMissing);
  CHECK(p.subjects[0].records[1].x[1](0) == Approx(-0.1));

  try {
    csv("subject_id,time,a,b,x,w\n1,1,1,2,0,0\n1,2,1,7,0,0\n", cfg);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  CHECK_THROWS_AS(csv("subject_id,time,a,b,x,w\n1,1,1,2,0,0\n1,1,2,2,0,0\n", cfg), ValidationError);
  CHECK_THROWS_AS(csv("subject_id,time,a,x,w\n1,1,1,0,0\n", cfg), ValidationError);
  CHECK_THROWS_AS(csv("subject_id,time,a,b,x,w\n1,1,1,2,,0\n", cfg), ValidationError);
  // rows come back sorted by (subject, time)
  const auto s = csv("subject_id,time,a,b,x,w\n10,2,1,2,0,0\n2,1,1,2,0,0\n10,1,2,2,0,0\n", cfg);
  CHECK(s.subjects[0].id == "2");
  CHECK(s.subjects[1].records[0].time == 1);
}

TEST_CASE("simulate -> write -> load round trip") {
  const ModelConfig cfg = config();
  const OrdinalPanel p = simulate_panel(simulation_design(cfg));
  std::ostringstream out;
  write_panel_csv(p, out);
  const OrdinalPanel q = csv(out.str(), cfg);
  CHECK(p == q);
}

TEST_CASE("config validation and echo completeness") {
  CHECK_THROWS_AS(parse_config(json::parse(R"({"responses": []})")), ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"responses": [{"name": "a", "K": 1}]})")), ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"responses": [{"name": "a", "K": 3, "family": "clayton"}]})")),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"responses": [{"name": "a", "K": 3}], "stage": 2})")), ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(
                      R"({"responses": [{"name": "a", "K": 3}, {"name": "b", "K": 3}], "qmc": {"shifts": 1}})")),
                  ValidationError);

  const ModelConfig minimal = parse_config(json::parse(R"({"responses": [{"name": "a", "K": 3}, {"name": "b", "K": 2}]})"));
  const auto echo = config_echo(minimal);
  for (const char* key : {"responses", "link_grid", "qmc", "optimizer", "stage", "max_free_params", "force_step3",
                          "compute_se", "threads"})
    CHECK(echo.contains(key));
  for (const char* key : {"seed", "shifts", "points_per_shift", "max_dim"}) CHECK(echo["qmc"].contains(key));
  for (const char* key : {"tol", "max_iter", "step_rel", "step_min"}) CHECK(echo["optimizer"].contains(key));
  for (const char* key : {"name", "K", "link", "covariates", "family", "nu_grid"}) CHECK(echo["responses"][0].contains(key));
  // the echo parses back to the same settings
  CHECK(config_echo(parse_config(json::parse(echo.dump()))) == echo);
}

TEST_CASE("fit report: determinism and thread independence") {
  ModelConfig cfg = config();
  const OrdinalPanel p = simulate_panel(simulation_design(cfg));
  const auto r1 = fit_report(cfg, p, run_fit(cfg, p));
  const auto r2 = fit_report(cfg, p, run_fit(cfg, p));
  CHECK(r1.dump() == r2.dump());
  cfg.threads = 3;
  auto r3 = fit_report(cfg, p, run_fit(cfg, p));
  r3["config"]["threads"] = 1;
  CHECK(r1.dump() == r3.dump());

  CHECK(r1["final"]["stage"] == "step2");
  CHECK(r1["step1"].size() == 2);
  CHECK(r1["step1"][1]["weakly_identified_categories"].is_array());
  const auto& par = r1["step1"][0]["parameters"][0];
  for (const char* key : {"name", "estimate", "se", "z", "p"}) CHECK(par.contains(key));
  CHECK(r1["step2"][0]["loglik"].get<double>() >= r1["step2"][0]["loglik_at_identity"].get<double>());
}

TEST_CASE("vuong from reports") {
  ModelConfig cfg = config();
  cfg.stage = 1;
  const OrdinalPanel p = simulate_panel(simulation_design(cfg));
  const auto a = json::parse(fit_report(cfg, p, run_fit(cfg, p)).dump());
  CHECK_THROWS_AS(vuong_from_reports(a, a), DegenerateVarianceError);
  cfg.responses[0].family = BivCopulaFamily::bvn();
  const auto b = json::parse(fit_report(cfg, p, run_fit(cfg, p)).dump());
  const VuongResult v = vuong_from_reports(a, b);
  CHECK(v.N == p.n());
  CHECK(std::isfinite(v.z0));
  json c = b;
  c["final"]["subject_ids"][0] = "nobody";
  CHECK_THROWS_AS(vuong_from_reports(a, c), ValidationError);
}

TEST_CASE("density grid") {
  const int n = 61;
  const Eigen::VectorXd z = density_grid_axis(n);
  const auto ind = emit_density_grid({BivCopulaFamily::independence(), 0.0}, n);
  double worst = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) worst = std::max(worst, std::abs(ind(a, b) - norm_pdf(z(a)) * norm_pdf(z(b))));
  CHECK(worst < 1e-4);

  const BivCopulaSpec gum{BivCopulaFamily::gumbel(), param_from_tau(BivCopulaFamily::gumbel(), 0.6)};
  const BivCopulaSpec bvn{BivCopulaFamily::bvn(), param_from_tau(BivCopulaFamily::bvn(), 0.6)};
  const auto g = emit_density_grid(gum, n), b = emit_density_grid(bvn, n);
  Eigen::Index ga, gb, ba, bb;
  g.maxCoeff(&ga, &gb);
  b.maxCoeff(&ba, &bb);
  CHECK(z(ga) + z(gb) > z(ba) + z(bb));

  // Riemann sum versus the exact mass of the square
  for (const auto& s : {gum, bvn}) {
    const auto grid = emit_density_grid(s, 241);
    const Eigen::VectorXd zz = density_grid_axis(241);
    const double hh = zz(1) - zz(0);
    const double riemann = grid.sum() * hh * hh;
    const double exact = biv_pmf_rect(s, norm_cdf(-3), norm_cdf(3), norm_cdf(-3), norm_cdf(3));
    CHECK(std::abs(riemann - exact) < 1e-3);
    CHECK(riemann > 0.98);
    CHECK(riemann < 1.0);
  }

  std::ostringstream out;
  write_density_grid_csv(ind, 3.0, out);
  CHECK(out.str().rfind("z1,z2,density\n", 0) == 0);
}
