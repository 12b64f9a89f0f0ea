#ifndef RRCOV_PENALIZED_HPP
#define RRCOV_PENALIZED_HPP

#include <optional>

#include "rrcov/types.hpp"
#include "rrcov/weights.hpp"

namespace rrcov {

// Penalty specification for the fixed-point solvers. The target is the
// matrix the penalty pulls the solution towards: the identity, the
// robust-scale multiple sigma2 * I (scale equivariant variant), or an
// arbitrary PD matrix Gamma.
struct PenaltySpec {
  enum class Kind { TP, KL, TylerBeta };
  enum class Target { Identity, SigmaHat2, Matrix };

  Kind kind = Kind::KL;
  double eta = 0.0;    // TP
  double gamma = 0.0;  // KL, TylerBeta
  double beta = 0.0;   // TylerBeta
  Target target = Target::Identity;
  double sigma2 = 1.0;  // SigmaHat2 target
  Matrix target_matrix;

  static PenaltySpec tp(double eta_) {
    PenaltySpec p;
    p.kind = Kind::TP;
    p.eta = eta_;
    return p;
  }
  static PenaltySpec kl(double gamma_) {
    PenaltySpec p;
    p.kind = Kind::KL;
    p.gamma = gamma_;
    return p;
  }
  static PenaltySpec tyler_beta(double beta_, double gamma_) {
    PenaltySpec p;
    p.kind = Kind::TylerBeta;
    p.beta = beta_;
    p.gamma = gamma_;
    return p;
  }

  PenaltySpec with_sigma2(double s2) const {
    PenaltySpec p = *this;
    p.target = Target::SigmaHat2;
    p.sigma2 = s2;
    return p;
  }
  PenaltySpec with_target(Matrix gamma_matrix) const {
    PenaltySpec p = *this;
    p.target = Target::Matrix;
    p.target_matrix = std::move(gamma_matrix);
    return p;
  }

  // The realized target matrix Gamma.
  Matrix target_mat(int q) const;
};

struct ScatterEstimate {
  Matrix sigma;  // the fixed point Sigma-hat
  PenaltySpec penalty;
  WeightFunction weight;
  int iterations = 0;
  double final_step = 0.0;  // relative Frobenius change at termination
  double residual = 0.0;    // ||Sigma - RHS(Sigma)||_F / ||Sigma||_F
  bool converged = false;
  bool unregularized_endpoint = false;  // trace-normalized Tyler fit at beta = q
};

// Iterates the TP/KL fixed point from Sigma_0 = Gamma until the
// relative Frobenius step drops below 1e-10 (cap 2000). Tyler weights
// drop zero rows and divide by the nonzero count n_o. General targets
// are handled by whitening y_i = Gamma^{-1/2} x_i and back-transforming.
ScatterEstimate solve_penalized(const DataMatrix& x, const WeightFunction& weight,
                                const PenaltySpec& penalty);

// The regularized Tyler estimator: the solution of
//   Sigma = (beta/n) sum x_i x_i^T / (x_i^T Sigma^-1 x_i) + gamma Gamma.
// Requires 0 <= beta < q strictly; Condition A is checked for beta >= 1.
ScatterEstimate solve_tyler_beta(const DataMatrix& x, double beta, double gamma,
                                 const PenaltySpec::Target target = PenaltySpec::Target::Identity,
                                 double sigma2 = 1.0);

// Trace-normalized unregularized Tyler fit, the flagged beta = q grid
// endpoint. Requires Condition A at beta = q.
ScatterEstimate tyler_shape(const DataMatrix& x);

// V-hat recovered from the penalized fit: TP: Sigma - eta T;
// KL/TylerBeta: (Sigma - gamma T)/(1 - gamma). Throws at gamma = 1
// (use generalized_sscm for that limit).
Matrix adjusted_v(const ScatterEstimate& est);

struct ConditionAResult {
  bool holds = false;
  bool probabilistic = false;
  // witness when violated: a subspace spanned by data points with
  // #points/n >= dim/beta
  int witness_dim = 0;
  int witness_count = 0;
};

// Condition A: #{x_i in V}/n < dim(V)/beta for every proper subspace V.
// Verified over data-spanned subspaces (sufficient: a violating
// subspace of maximal count is spanned by data points). Always holds
// for beta < 1.
ConditionAResult check_condition_a(const DataMatrix& x, double beta);

// Largest beta for which Condition A holds on x (the condition holds
// iff beta < this threshold). +inf-free: returns at least q for data in
// general position; capped at n.
double condition_a_beta_max(const DataMatrix& x);

// sigma2_beta * shape with sigma2_beta = median{x_i^T shape^-1 x_i}/q
// (lower median; zero rows included).
Matrix scaled_scatter(const Matrix& shape, const DataMatrix& x);

}  // namespace rrcov

#endif
