#ifndef RRCOV_HBD_HPP
#define RRCOV_HBD_HPP

#include <cstdint>
#include <vector>

#include "rrcov/types.hpp"

namespace rrcov {

// q log(z^T S^-1 z / z^T z) + log det S for z != 0.
double d_value(const Vector& z, const Matrix& shape);

// Lower median of d_value over the nonzero rows.
double D_value(const DataMatrix& z, const Matrix& shape);

// Unnormalized deviance q log(z^T S^-1 z) + log det S for z != 0.
// Unlike d_value, every term shifts by the same constant under a
// nonsingular linear map of (z, S), so a median of these deviances has
// an exactly equivariant minimizer; the two agree whenever ||z|| = 1.
double acg_deviance(const Vector& z, const Matrix& shape);

// Lower median of acg_deviance over the nonzero rows; the objective
// minimized by sigma_R.
double objective_R(const DataMatrix& z, const Matrix& shape);

struct HbdOptions {
  int restarts = 20;
  int max_evals = 4000;        // Nelder-Mead budget per restart
  double cn_cap = 1e4;         // candidate shapes are projected to this
                               // condition number (keeps the search
                               // bounded on degenerate data)
  std::uint64_t seed = 1;
};

struct HbdResult {
  Matrix shape;  // trace q
  double objective_value = 0.0;
  int restarts = 0;
  std::vector<double> restart_values;  // best value per restart
};

// Minimizes objective_R over trace-q shapes by multi-start Nelder-Mead
// on a log-Cholesky parameterization, restarts seeded from the
// identity, the SSCM shape, regularized Tyler fits and random
// perturbations. The unnormalized median objective is used so that the
// minimizer is linearly equivariant (per-point norm factors would
// otherwise reshuffle which observation is the median and break
// equivariance); on unit-norm data it coincides with D_value. A
// heuristic global minimum; q <= 6 enforced.
HbdResult sigma_R(const DataMatrix& x, const HbdOptions& options = {});

// Scale completion: median{x_i^T shape^-1 x_i}/q times the sigma_R shape.
Matrix sigma_sc_R(const DataMatrix& x, const HbdOptions& options = {});

struct AffineLocScatter {
  Vector mu;
  Matrix sigma;
  double alpha = 0.0;
};

// Location-scatter via the augmented data (x_i^T, 1)^T: runs sigma_sc_R
// in dimension q+1 and partitions the block matrix into (mu, sigma, alpha).
AffineLocScatter affine_location_scatter(const DataMatrix& x,
                                         const HbdOptions& options = {});

}  // namespace rrcov

#endif
