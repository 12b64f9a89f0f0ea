#include "rrcov/location.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rrcov/core.hpp"

namespace rrcov {

Vector marginal_median(const DataMatrix& x) {
  Vector med(x.q());
  for (int j = 0; j < x.q(); ++j) {
    std::vector<double> col(x.n());
    for (int i = 0; i < x.n(); ++i) col[i] = x.rows()(i, j);
    med(j) = lower_median(col);
  }
  return med;
}

SpatialMedianResult spatial_median(const DataMatrix& x) {
  const int n = x.n();
  SpatialMedianResult res;
  if (n == 1) {
    res.point = x.row(0);
    return res;
  }
  Vector mu = marginal_median(x);
  const int kMaxIter = 10000;
  const double kTol = 1e-10;
  const double kCollide = 1e-12;
  for (int it = 1; it <= kMaxIter; ++it) {
    Vector num = Vector::Zero(x.q());
    double den = 0.0;
    int collide = -1;
    for (int i = 0; i < n; ++i) {
      const Vector d = x.row(i) - mu;
      const double dist = d.norm();
      if (dist < kCollide) {
        collide = i;
        continue;
      }
      num += x.row(i) / dist;
      den += 1.0 / dist;
    }
    Vector next;
    if (den == 0.0) {
      // every point coincides with the iterate
      res.point = mu;
      res.iterations = it;
      return res;
    }
    const Vector t = num / den;
    if (collide >= 0) {
      // Vardi-Zhang: r is the negative subgradient excluding the
      // coinciding point; the point is the minimizer when ||r|| <= 1.
      Vector r = Vector::Zero(x.q());
      for (int i = 0; i < n; ++i) {
        if (i == collide) continue;
        const Vector d = x.row(i) - mu;
        r += d / d.norm();
      }
      const double rnorm = r.norm();
      if (rnorm <= 1.0) {
        res.point = mu;
        res.iterations = it;
        return res;
      }
      const double lam = 1.0 / rnorm;
      next = (1.0 - lam) * t + lam * mu;
    } else {
      next = t;
    }
    const double step = (next - mu).norm();
    const double scale = std::max(mu.norm(), 1.0);
    mu = next;
    if (step < kTol * scale) {
      res.point = mu;
      res.iterations = it;
      return res;
    }
  }
  res.point = mu;
  res.iterations = kMaxIter;
  res.converged = false;
  return res;
}

double robust_sigma2(const DataMatrix& x, const Vector& center) {
  if (center.size() != x.q())
    throw std::invalid_argument("robust_sigma2: center dimension mismatch");
  std::vector<double> sq(x.n());
  for (int i = 0; i < x.n(); ++i) sq[i] = (x.row(i) - center).squaredNorm();
  const double med = lower_median(sq);
  if (med <= 0.0) throw std::runtime_error("robust_sigma2: degenerate scale (median 0)");
  return med / x.q();
}

Vector resolve_center(const DataMatrix& x, const CenterSpec& spec) {
  switch (spec.mode) {
    case CenterSpec::Mode::Known:
      if (spec.known.size() != x.q())
        throw std::invalid_argument("CenterSpec: known center dimension mismatch");
      return spec.known;
    case CenterSpec::Mode::SpatialMedian:
      return spatial_median(x).point;
    case CenterSpec::Mode::MarginalMedian:
      return marginal_median(x);
    case CenterSpec::Mode::PairwiseDifferences:
      throw std::invalid_argument("PairwiseDifferences has no single center");
  }
  throw std::logic_error("unreachable");
}

DataMatrix center_data(const DataMatrix& x, const CenterSpec& spec) {
  if (spec.mode == CenterSpec::Mode::PairwiseDifferences) {
    const long n = x.n();
    const long pairs = n * (n - 1) / 2;
    if (pairs > 1000000)
      throw std::invalid_argument("center_data: pairwise differences exceed 10^6 rows");
    Matrix out(pairs, x.q());
    long k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) out.row(k++) = x.rows().row(i) - x.rows().row(j);
    return DataMatrix(std::move(out));
  }
  const Vector c = resolve_center(x, spec);
  Matrix out = x.rows();
  out.rowwise() -= c.transpose();
  return DataMatrix(std::move(out));
}

}  // namespace rrcov
