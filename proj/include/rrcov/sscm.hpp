#ifndef RRCOV_SSCM_HPP
#define RRCOV_SSCM_HPP

#include "rrcov/location.hpp"
#include "rrcov/types.hpp"
#include "rrcov/weights.hpp"

namespace rrcov {

struct SignMatrix {
  Matrix matrix;       // q x q symmetric PSD
  double trace_value;  // (count of nonzero centered rows)/n
};

// x/||x|| for x != 0, the zero vector otherwise.
Vector spatial_sign(const Vector& x);

// (1/n) sum S(x_i - mu) S(x_i - mu)^T. Zero centered rows contribute
// zero matrices and still count in the denominator.
SignMatrix sscm(const DataMatrix& x, const CenterSpec& center);

// (1/n) sum u((x_i - mu)^T (x_i - mu)) (x_i - mu)(x_i - mu)^T; the
// gamma = 1 limit of the regularized family. Throws when the centered
// data do not span R^q (rank-deficient result).
Matrix generalized_sscm(const DataMatrix& x, const WeightFunction& u,
                        const CenterSpec& center);

}  // namespace rrcov

#endif
