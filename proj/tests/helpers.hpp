#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ordcop/joint_model.hpp"
#include "ordcop/panel.hpp"
#include "ordcop/simulate.hpp"

namespace testutil {

using namespace ordcop;

// Panel without covariates: paths[i][t] is the response vector of subject i at time t+1.
inline OrdinalPanel panel_from_paths(const std::vector<int>& K, const std::vector<std::vector<std::vector<int>>>& paths) {
  OrdinalPanel p;
  for (std::size_t j = 0; j < K.size(); ++j) p.responses.push_back("y" + std::to_string(j + 1));
  p.K = K;
  p.series_columns.assign(K.size(), {});
  for (std::size_t i = 0; i < paths.size(); ++i) {
    Subject s;
    s.id = std::to_string(i + 1);
    for (std::size_t t = 0; t < paths[i].size(); ++t) {
      Record r;
      r.time = static_cast<int>(t + 1);
      r.y = paths[i][t];
      r.z = Eigen::VectorXd(0);
      s.records.push_back(r);
    }
    p.subjects.push_back(s);
  }
  p.build_design();
  return p;
}

inline MarginalParams marginal(std::vector<double> cut, std::vector<double> beta = {}, Link link = Link::Probit) {
  MarginalParams m;
  m.cutpoints = Eigen::Map<Eigen::VectorXd>(cut.data(), static_cast<Eigen::Index>(cut.size()));
  m.beta = Eigen::Map<Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  m.link = link;
  return m;
}

inline SeriesModel series(std::vector<double> cut, BivCopulaFamily f, double theta, std::vector<double> beta = {}) {
  return {marginal(std::move(cut), std::move(beta)), {f, theta}};
}

// Simulation design with one N(0,1) covariate per response (own column) and
// exchangeable R.
inline SimDesign design_with_covariates(int n, int T, const std::vector<SeriesModel>& sm, double rho,
                                        LinkCopula link, std::uint64_t seed) {
  SimDesign d;
  d.n = n;
  d.T = T;
  d.jp.series = sm;
  d.jp.R = CorrelationMatrix::exchangeable(static_cast<Eigen::Index>(sm.size()), rho);
  d.jp.link = link;
  d.seed = seed;
  for (std::size_t j = 0; j < sm.size(); ++j) {
    d.responses.push_back("y" + std::to_string(j + 1));
    const int nb = static_cast<int>(sm[j].marginal.beta.size());
    std::vector<int> cols;
    for (int b = 0; b < nb; ++b) {
      cols.push_back(static_cast<int>(d.columns.size()));
      d.columns.push_back({"x" + std::to_string(j + 1) + "_" + std::to_string(b + 1), CovariateKind::Normal, 0.0, true});
    }
    d.series_columns.push_back(cols);
  }
  return d;
}

// One-response panel simulated from m with its own N(0,1) covariates.
inline OrdinalPanel single_series(const SeriesModel& m, int n, int T, std::uint64_t seed) {
  JointParams jp;
  jp.series = {m, series({0.0}, BivCopulaFamily::independence(), 0.0)};
  jp.R = CorrelationMatrix::identity(2);
  SimDesign d = design_with_covariates(n, T, jp.series, 0.0, LinkCopula::mvn(), seed);
  d.jp = jp;
  OrdinalPanel p = simulate_panel(d);
  // keep only the first response
  OrdinalPanel q;
  q.responses = {p.responses[0]};
  q.K = {p.K[0]};
  q.covariates = p.covariates;
  q.series_columns = {p.series_columns[0]};
  q.subjects = p.subjects;
  for (auto& s : q.subjects)
    for (auto& r : s.records) r.y.resize(1);
  q.build_design();
  return q;
}

// Vector of n draws from U(lo, hi).
inline std::vector<double> uniforms(std::mt19937_64& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(n);
  for (auto& v : out) v = u(rng);
  return out;
}

}  // namespace testutil
