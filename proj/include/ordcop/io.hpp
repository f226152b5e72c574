#pragma once

// JSON model configuration and long-format panel CSV.
//
// CSV: header row, then one row per (subject, time): subject_id, time, one
// column per response, then covariate columns. Missing responses are empty
// fields or NA.

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ordcop/estimate.hpp"
#include "ordcop/simulate.hpp"

namespace ordcop {

struct ResponseConfig {
  std::string name;
  int K = 2;
  Link link = Link::Probit;
  std::vector<std::string> covariates;
  BivCopulaFamily family = BivCopulaFamily::bvn();
  std::vector<double> nu_grid{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

struct SimulationConfig {
  int n = 100;
  int T = 5;
  std::uint64_t seed = 1;
  LinkCopula link;
  Eigen::MatrixXd R;
  std::vector<CovariateColumn> covariates;
  std::vector<SeriesModel> truth;  // one per response
};

struct ModelConfig {
  std::vector<ResponseConfig> responses;
  std::vector<LinkCopula> link_grid{LinkCopula::mvn()};
  QmcConfig qmc;
  OptimizerOptions optimizer;
  int stage = 2;
  int max_free_params = 60;
  bool force_step3 = false;
  bool compute_se = true;
  int threads = 1;
  std::string data;
  std::optional<SimulationConfig> simulation;

  int d() const { return static_cast<int>(responses.size()); }
};

// Throws ValidationError on schema violations.
ModelConfig parse_config(const nlohmann::json& j);
ModelConfig load_config(const std::string& path);

// Every setting the run uses, defaults included.
nlohmann::ordered_json config_echo(const ModelConfig& cfg);

// Union of the responses' covariate names in order of first appearance.
std::vector<std::string> covariate_columns(const ModelConfig& cfg);

FitOptions fit_options(const ModelConfig& cfg);

OrdinalPanel parse_panel_csv(std::istream& in, const ModelConfig& cfg);
OrdinalPanel load_panel_csv(const std::string& path, const ModelConfig& cfg);

void write_panel_csv(const OrdinalPanel& panel, std::ostream& out);
void write_panel_csv(const OrdinalPanel& panel, const std::string& path);

// Design for `simulate` from cfg.simulation; throws ValidationError if absent.
SimDesign simulation_design(const ModelConfig& cfg);

}  // namespace ordcop
