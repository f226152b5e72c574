// ordcop command line: fit, simulate, vuong, asymptotics, density-grid.
//
// Exit status 0 on success, 2 on validation errors, 3 on numerical failures,
// 1 otherwise. Failures are reported as a JSON object on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ordcop/errors.hpp"
#include "ordcop/io.hpp"
#include "ordcop/report.hpp"

namespace fs = std::filesystem;
using namespace ordcop;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> qmc_points, qmc_shifts, threads;
  std::string config;
  std::string out;
};

void apply_overrides(ModelConfig& cfg, const Globals& g) {
  if (g.seed) {
    cfg.qmc.seed = *g.seed;
    if (cfg.simulation) cfg.simulation->seed = *g.seed;
  }
  if (g.qmc_points) cfg.qmc.points_per_shift = *g.qmc_points;
  if (g.qmc_shifts) cfg.qmc.shifts = *g.qmc_shifts;
  if (g.threads) cfg.threads = *g.threads;
  try {
    validate(cfg.qmc);
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  if (cfg.threads < 1) throw ValidationError("--threads must be at least 1");
}

ModelConfig config_from(const Globals& g) {
  if (g.config.empty()) throw ValidationError("--config is required");
  ModelConfig cfg = load_config(g.config);
  apply_overrides(cfg, g);
  return cfg;
}

// Writes to <out>/<name>, or stdout when --out is not given.
void emit(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::error_code ec;
  fs::create_directories(g.out, ec);
  const fs::path p = fs::path(g.out) / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + p.string());
  f << text;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

int fail(int code, const std::string& kind, const std::string& msg, const ordered_json& extra = {}) {
  ordered_json e;
  e["error"] = kind;
  e["message"] = msg;
  e["exit_code"] = code;
  for (auto it = extra.begin(); it != extra.end(); ++it) e[it.key()] = it.value();
  std::cerr << e.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copula Markov models for multivariate ordinal panels"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  int qmc_points = 0, qmc_shifts = 0, threads = 1;
  auto* o_seed = app.add_option("--seed", seed, "QMC seed (and simulation seed)");
  auto* o_pts = app.add_option("--qmc-points", qmc_points, "lattice points per shift");
  auto* o_sh = app.add_option("--qmc-shifts", qmc_shifts, "number of random shifts");
  auto* o_thr = app.add_option("--threads", threads, "worker threads");
  app.add_option("--config", g.config, "model configuration (JSON)");
  app.add_option("--out", g.out, "output directory (default: stdout)");
  for (auto* o : {o_seed, o_pts, o_sh, o_thr}) o->configurable(false);

  auto* fit = app.add_subcommand("fit", "fit stages 1..3 and write fit_report.json");
  std::string data;
  fit->add_option("--data", data, "panel CSV (overrides the config's data path)");

  app.add_subcommand("simulate", "simulate a panel from the config's simulation section to panel.csv");

  auto* vu = app.add_subcommand("vuong", "Vuong test between two fit reports (model 1, model 2)");
  std::string rep1, rep2;
  vu->add_option("report1", rep1, "fit report of model 1")->required();
  vu->add_option("report2", rep2, "fit report of model 2")->required();

  auto* asy = app.add_subcommand("asymptotics", "limiting MSLE versus MLE over the exchangeable grid");
  bool quick = false;
  asy->add_flag("--quick", quick, "only the first two designs");

  auto* dg = app.add_subcommand("density-grid", "copula density with normal margins, as CSV");
  std::string family = "bvn";
  double tau = 0.6, nu = 4.0, zmax = 3.0;
  int grid_n = 61;
  dg->add_option("--family", family, "bvn, bvt, frank, gumbel, sgumbel, independence");
  dg->add_option("--tau", tau, "Kendall's tau");
  dg->add_option("--nu", nu, "degrees of freedom for bvt");
  dg->add_option("--grid-n", grid_n, "points per axis");
  dg->add_option("--zmax", zmax, "grid half-width on the normal scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", e.what());
  }
  if (o_seed->count()) g.seed = seed;
  if (o_pts->count()) g.qmc_points = qmc_points;
  if (o_sh->count()) g.qmc_shifts = qmc_shifts;
  if (o_thr->count()) g.threads = threads;

  try {
    if (fit->parsed()) {
      ModelConfig cfg = config_from(g);
      if (!data.empty()) cfg.data = data;
      if (cfg.data.empty()) throw ValidationError("no data file: set \"data\" in the config or pass --data");
      if (fs::path(cfg.data).is_relative() && !fs::exists(cfg.data))
        cfg.data = (fs::path(g.config).parent_path() / cfg.data).string();
      const OrdinalPanel panel = load_panel_csv(cfg.data, cfg);
      const FitRun run = run_fit(cfg, panel);
      emit(g, "fit_report.json", dump(fit_report(cfg, panel, run)));
    } else if (app.got_subcommand("simulate")) {
      const ModelConfig cfg = config_from(g);
      const OrdinalPanel panel = simulate_panel(simulation_design(cfg), cfg.threads);
      std::ostringstream s;
      write_panel_csv(panel, s);
      emit(g, "panel.csv", s.str());
    } else if (vu->parsed()) {
      const VuongResult v = vuong_from_reports(read_json(rep1), read_json(rep2));
      emit(g, "vuong.json", dump(vuong_report(v)));
    } else if (asy->parsed()) {
      QmcConfig q;
      if (g.seed) q.seed = *g.seed;
      if (g.qmc_points) q.points_per_shift = *g.qmc_points;
      if (g.qmc_shifts) q.shifts = *g.qmc_shifts;
      validate(q);
      LimitOptions lo;
      lo.threads = g.threads.value_or(1);
      auto grid = default_asymptotic_grid();
      if (quick && grid.size() > 2) grid.resize(2);
      std::vector<AsymRow> rows;
      for (const auto& d : grid) rows.push_back(run_asymptotic_design(d, q, lo));
      emit(g, "asymptotics.json", dump(asymptotics_report(rows, q)));
    } else if (dg->parsed()) {
      BivCopulaSpec spec;
      spec.family = parse_family(family, nu);
      spec.theta = spec.family.tag == Family::Independence ? 0.0 : param_from_tau(spec.family, tau);
      const auto grid = emit_density_grid(spec, grid_n, zmax);
      std::ostringstream s;
      write_density_grid_csv(grid, zmax, s);
      emit(g, "density_grid.csv", s.str());
    }
  } catch (const ValidationError& e) {
    return fail(2, "validation", e.what());
  } catch (const DomainError& e) {
    return fail(2, "domain", e.what());
  } catch (const DegenerateVarianceError& e) {
    return fail(3, "degenerate_variance", e.what());
  } catch (const HessianNotNegativeDefinite& e) {
    return fail(3, "hessian_not_negative_definite", e.what(), {{"eigenvalues", e.eigenvalues}});
  } catch (const NumericalError& e) {
    return fail(3, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
  return 0;
}
