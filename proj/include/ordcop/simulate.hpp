#pragma once

// Exact sampler for the joint copula Markov model. At the first wave each
// response is the marginal inverse cdf of a link-copula uniform; afterwards a
// fresh link-copula vector is pushed through the conditional transition cdfs.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ordcop/joint_model.hpp"
#include "ordcop/panel.hpp"

namespace ordcop {

// One draw (U_1..U_d) from the MVN or MVT copula with correlation R.
Eigen::VectorXd sample_link_copula(const CorrelationMatrix& R, const LinkCopula& link, std::mt19937_64& rng);
Eigen::VectorXd sample_link_copula(const CorrelationMatrix& R, const LinkCopula& link, std::uint64_t seed);

enum class CovariateKind { Normal, Bernoulli, Constant };

struct CovariateColumn {
  std::string name;
  CovariateKind kind = CovariateKind::Normal;
  double param = 0.5;        // Bernoulli probability, or the Constant value
  bool time_varying = true;  // false: drawn once per subject
};

struct SimDesign {
  int n = 0;
  int T = 0;
  JointParams jp;
  std::vector<std::string> responses;          // defaults to y1..yd
  std::vector<CovariateColumn> columns;
  std::vector<std::vector<int>> series_columns;  // per response, indices into columns
  // Optional fixed design: fixed_rows[t] is the covariate row at wave t for every
  // subject. When non-empty it replaces the column generators.
  std::vector<Eigen::VectorXd> fixed_rows;
  std::uint64_t seed = 1;
};

void validate(const SimDesign& design);

// Subject i uses its own generator seeded from (seed, i), so the panel does not
// depend on the thread count.
OrdinalPanel simulate_panel(const SimDesign& design, int threads = 1);

// Smallest category y with cdf(y) >= u, where cdf(K) = 1.
template <class Cdf>
int inverse_category(int K, double u, Cdf&& cdf) {
  for (int y = 1; y < K; ++y)
    if (cdf(y) >= u) return y;
  return K;
}

}  // namespace ordcop
