#ifndef RRCOV_CORE_HPP
#define RRCOV_CORE_HPP

#include <cstdint>
#include <vector>

#include "rrcov/types.hpp"

namespace rrcov {

struct SpectralDecomposition {
  Vector eigenvalues;   // sorted descending
  Matrix eigenvectors;  // orthonormal columns, matching order
};

// Eigendecomposition with eigenvalues sorted descending and a
// deterministic sign convention: the largest-magnitude component of
// each eigenvector is made positive.
SpectralDecomposition spectral_decompose(const SymmetricPD& m);

// lambda_1 / lambda_q of a positive definite matrix.
double condition_number(const SymmetricPD& m);
double condition_number(const Matrix& m);  // symmetrizes, throws if not PD

// ||log(V1^{-1/2} V2 V1^{-1/2})||_F
double riemannian_distance(const SymmetricPD& v1, const SymmetricPD& v2);
double riemannian_distance(const Matrix& v1, const Matrix& v2);

// q M / tr(M), renormalized so the trace equals q exactly.
Matrix shape_of(const Matrix& m);

struct GeneralPositionResult {
  bool in_general_position = false;
  bool probabilistic = false;  // randomized subset check was used
};

// True iff every subset of r <= q rows has rank r. Exhaustive over
// q-subsets when C(n, q) <= 10^6, otherwise 10^4 random subsets with
// the result flagged probabilistic.
GeneralPositionResult check_general_position(const DataMatrix& x);

// Lower median: the ceil(n/2)-th order statistic. Used for every
// median in this library; see robust_sigma2 and the CV criteria.
double lower_median(std::vector<double> values);

// SplitMix64-style seed mixing for deriving per-cell RNG streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace rrcov

#endif
