#ifndef RRCOV_LOCATION_HPP
#define RRCOV_LOCATION_HPP

#include "rrcov/types.hpp"

namespace rrcov {

struct CenterSpec {
  enum class Mode { Known, SpatialMedian, MarginalMedian, PairwiseDifferences };
  Mode mode = Mode::SpatialMedian;
  Vector known;

  static CenterSpec known_center(Vector c) {
    CenterSpec s;
    s.mode = Mode::Known;
    s.known = std::move(c);
    return s;
  }
  static CenterSpec spatial_median() { return CenterSpec{Mode::SpatialMedian, {}}; }
  static CenterSpec marginal_median() { return CenterSpec{Mode::MarginalMedian, {}}; }
  static CenterSpec pairwise_differences() {
    return CenterSpec{Mode::PairwiseDifferences, {}};
  }
};

struct SpatialMedianResult {
  Vector point;
  int iterations = 0;
  bool converged = true;  // false when the 10^4 iteration cap was hit
};

// arg min_mu sum_i ||x_i - mu|| by damped Weiszfeld iteration with the
// Vardi-Zhang modification when an iterate collides with a data point.
// Initialization is the coordinate-wise median; convergence when the
// relative step drops below 1e-10.
SpatialMedianResult spatial_median(const DataMatrix& x);

Vector marginal_median(const DataMatrix& x);

// median{(x_i - center)^T (x_i - center)} / q, lower median. Throws
// when the median squared distance is zero (degenerate scale).
double robust_sigma2(const DataMatrix& x, const Vector& center);

// Known/SpatialMedian/MarginalMedian subtract the center from every
// row; PairwiseDifferences returns the n(n-1)/2 differences x_i - x_j,
// i < j (rejected above 10^6 rows).
DataMatrix center_data(const DataMatrix& x, const CenterSpec& spec);

// Resolves the center a spec would subtract (throws for
// PairwiseDifferences, which has no single center).
Vector resolve_center(const DataMatrix& x, const CenterSpec& spec);

}  // namespace rrcov

#endif
