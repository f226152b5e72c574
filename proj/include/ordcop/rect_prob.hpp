#pragma once

// Multivariate normal and Student-t rectangle probabilities.
//
// mvn_rect / mvt_rect follow the Genz-Bretz separation-of-variables pipeline:
// Cholesky factorisation with variable reordering, sequential conditioning onto
// the unit cube, a rank-1 lattice rule with independent random shifts and
// antithetic pairing. The shift set is a pure function of QmcConfig, so every
// call with the same config integrates against the same point set (common
// random numbers).

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace ordcop {

struct Rectangle {
  Eigen::VectorXd lower;  // entries may be -inf
  Eigen::VectorXd upper;  // entries may be +inf

  Eigen::Index dim() const { return lower.size(); }
};

/// Unit-diagonal, symmetric, positive-definite matrix. Construction validates.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Eigen::MatrixXd m);

  static CorrelationMatrix identity(Eigen::Index d);
  static CorrelationMatrix exchangeable(Eigen::Index d, double rho);

  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

struct QmcConfig {
  std::uint64_t seed = 20240517;
  int shifts = 12;
  int points_per_shift = 4096;
  int max_dim = 64;
};

void validate(const QmcConfig& cfg);

struct RectProbability {
  double value = 0.0;
  double std_error = 0.0;
};

// A non-empty `order` (original coordinate indices, first integrated first)
// replaces the adaptive reordering. The adaptive order depends on the limits,
// so it can switch under a small parameter change and make the estimate jump;
// a fixed order keeps the estimate a smooth function of the limits and R.
RectProbability mvn_rect(const Rectangle& rect, const CorrelationMatrix& R, const QmcConfig& cfg,
                         std::span<const int> order = {});

RectProbability mvt_rect(const Rectangle& rect, const CorrelationMatrix& R, double nu,
                         const QmcConfig& cfg, std::span<const int> order = {});

// The adaptive order mvn_rect would use (retained coordinates only; empty for
// trivial rectangles).
std::vector<int> rect_variable_order(const Rectangle& rect, const CorrelationMatrix& R);

/// Deterministic normal rectangle probability under R = (1 - rho) I + rho J,
/// 0 < rho < 1, by adaptive Gauss-Kronrod on the one-dimensional mixture
/// representation. Error below quad_tol.
double mvn_rect_exchangeable(const Rectangle& rect, double rho, double quad_tol = 1e-12);

}  // namespace ordcop
