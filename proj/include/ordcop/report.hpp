#pragma once

// Fit pipeline driver and the JSON/CSV artifacts written by the command line.

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

#include "ordcop/asymptotics.hpp"
#include "ordcop/estimate.hpp"
#include "ordcop/inference.hpp"
#include "ordcop/io.hpp"

namespace ordcop {

struct FitRun {
  std::vector<SeriesFit> step1;
  std::vector<JointFit> step2;   // one per link-copula candidate
  std::optional<JointFit> step3;
  int selected_link = -1;        // index into step2 with the largest log-likelihood
};

FitRun run_fit(const ModelConfig& cfg, const OrdinalPanel& panel);

nlohmann::ordered_json fit_report(const ModelConfig& cfg, const OrdinalPanel& panel, const FitRun& run);

// Vuong comparison of the final-stage per-subject terms of two fit reports
// (model 1 = a, model 2 = b). Subject ids must agree.
VuongResult vuong_from_reports(const nlohmann::json& a, const nlohmann::json& b);
nlohmann::ordered_json vuong_report(const VuongResult& v);

nlohmann::ordered_json asymptotics_report(const std::vector<AsymRow>& rows, const QmcConfig& cfg);

// Density of the copula with standard normal margins on a grid_n x grid_n grid
// over [-zmax, zmax]^2, from rectangle probabilities of half-width delta.
// Entry (a, b) is at z1 = z[a], z2 = z[b].
Eigen::MatrixXd emit_density_grid(const BivCopulaSpec& spec, int grid_n, double zmax = 3.0, double delta = 1e-3);
Eigen::VectorXd density_grid_axis(int grid_n, double zmax = 3.0);
void write_density_grid_csv(const Eigen::MatrixXd& grid, double zmax, std::ostream& out);

}  // namespace ordcop
