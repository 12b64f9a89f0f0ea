#ifndef RRCOV_POPULATION_HPP
#define RRCOV_POPULATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrcov/types.hpp"
#include "rrcov/weights.hpp"

namespace rrcov {

// Population specification: mean zero, scatter with the given
// eigenstructure, and a radial law for the spherical generator
// z = r * u with u uniform on the unit sphere.
struct EllipticalModel {
  enum class Radial { Normal, StudentT, PointMass };

  int q = 1;
  Vector sigma_o_eigenvalues;  // descending, positive
  Radial radial = Radial::Normal;
  double radial_param = 0.0;  // dof for StudentT, radius for PointMass
  Matrix eigenvectors;        // orthonormal basis; identity when empty

  static EllipticalModel normal(Vector eigenvalues);
  static EllipticalModel student_t(Vector eigenvalues, double dof);
  static EllipticalModel point_mass(Vector eigenvalues, double radius);

  Matrix sigma_o() const;
  void validate() const;
};

// N spherical draws z = r * u, one per row; deterministic in seed.
Matrix sample_spherical(const EllipticalModel& model, int n, std::uint64_t seed);

// N draws from the elliptical model itself (x = P Lambda^{1/2} z).
Matrix sample_elliptical(const EllipticalModel& model, int n, std::uint64_t seed);

struct PopulationSolution {
  Vector lambda;    // Lambda_F, descending with Lambda_o
  Vector lambda_v;  // (lambda_j - gamma)/(1 - gamma)
  double gamma = 0.0;
  int mc_draws = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Monte Carlo fixed point for the population eigenvalue system
//   lambda_j = (1-gamma) lambda_oj E[u(sum_k lambda_ok Z_k^2/lambda_k) Z_j^2] + gamma
// using one frozen set of N spherical draws (common random numbers)
// so the iteration has a true fixed point. lambda starts at lambda_o;
// stops at max relative change < 1e-9 or 5000 iterations.
// symmetrize augments the frozen sample with all cyclic coordinate
// shifts, a variance-reduction device that makes the per-coordinate
// moments exact when the model is permutation invariant (e.g. Sigma_o
// proportional to the identity).
PopulationSolution solve_lambda_system(const EllipticalModel& model,
                                       const WeightFunction& weight, double gamma,
                                       int n_draws = 100000, std::uint64_t seed = 1,
                                       bool symmetrize = false);

struct PopulationCell {
  int model_index = 0;
  double kappa = 0.0;
  double gamma = 0.0;
  std::optional<double> cn_sigma;  // lambda_1/lambda_q
  std::optional<double> cn_v;      // lambda_v1/lambda_vq
  std::string error;               // non-empty when the cell failed
};

// One cell per (model, kappa, gamma) with the weight u(s) = kappa/(s+2).
// Cell RNG streams derive from (seed, cell index); honors the
// RRCOV_PARALLEL environment variable for the thread count.
std::vector<PopulationCell> population_table(const std::vector<EllipticalModel>& models,
                                             const std::vector<double>& kappas,
                                             const std::vector<double>& gammas,
                                             int n_draws, std::uint64_t seed);

}  // namespace rrcov

#endif
