#pragma once

// Randomly shifted rank-1 lattice point sets, cached per configuration.

#include <cstdint>
#include <memory>
#include <vector>

#include "ordcop/rect_prob.hpp"

namespace ordcop::detail {

struct PointSet {
  int shifts = 0;
  int points = 0;
  int dim = 0;
  // values[(s * points + k) * dim + j], baker-transformed, in [0, 1].
  std::vector<double> values;

  const double* point(int s, int k) const {
    return values.data() + (static_cast<std::size_t>(s) * points + k) * dim;
  }
};

// Component-by-component generating vector for an n-point lattice (product
// weights 1/j^2, Korobov alpha = 2 criterion). Extensible in dimension.
std::vector<std::uint32_t> generating_vector(int n, int dim);

std::shared_ptr<const PointSet> point_set(const QmcConfig& cfg, int dim);

// sqrt(W / nu), W ~ chi-square(nu), evaluated at the first coordinate of every
// point (index 2 * (s * points + k)) and at its antithetic partner (+1).
std::shared_ptr<const std::vector<double>> radial_values(const QmcConfig& cfg, int dim, double nu);

}  // namespace ordcop::detail
