#include "rrcov/sscm.hpp"

namespace rrcov {

Vector spatial_sign(const Vector& x) {
  const double norm = x.norm();
  if (norm == 0.0) return Vector::Zero(x.size());
  return x / norm;
}

SignMatrix sscm(const DataMatrix& x, const CenterSpec& center) {
  const DataMatrix centered = center_data(x, center);
  const int q = centered.q();
  Matrix acc = Matrix::Zero(q, q);
  for (int i = 0; i < centered.n(); ++i) {
    const Vector s = spatial_sign(centered.row(i));
    acc.noalias() += s * s.transpose();
  }
  acc /= centered.n();
  return SignMatrix{acc, acc.trace()};
}

Matrix generalized_sscm(const DataMatrix& x, const WeightFunction& u,
                        const CenterSpec& center) {
  const DataMatrix centered = center_data(x, center);
  const int q = centered.q();
  Matrix acc = Matrix::Zero(q, q);
  for (int i = 0; i < centered.n(); ++i) {
    const Vector xi = centered.row(i);
    const double s = xi.squaredNorm();
    if (s == 0.0) continue;  // S(0) = 0 convention; still counts in 1/n
    acc.noalias() += u.u(s) * (xi * xi.transpose());
  }
  acc /= centered.n();
  Eigen::SelfAdjointEigenSolver<Matrix> es(acc, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 1e-14 * std::max(es.eigenvalues().maxCoeff(), 1e-300))
    throw std::runtime_error("generalized_sscm: rank-deficient (data do not span R^q)");
  return acc;
}

}  // namespace rrcov
