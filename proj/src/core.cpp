#include "rrcov/core.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rrcov {

SpectralDecomposition spectral_decompose(const SymmetricPD& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_decompose: eigensolver failed");
  const int q = m.dim();
  SpectralDecomposition out;
  out.eigenvalues = Vector(q);
  out.eigenvectors = Matrix(q, q);
  // Eigen returns ascending order; reverse to descending.
  for (int j = 0; j < q; ++j) {
    out.eigenvalues(j) = es.eigenvalues()(q - 1 - j);
    out.eigenvectors.col(j) = es.eigenvectors().col(q - 1 - j);
  }
  for (int j = 0; j < q; ++j) {
    int imax = 0;
    out.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.eigenvectors(imax, j) < 0) out.eigenvectors.col(j) *= -1.0;
  }
  return out;
}

double condition_number(const SymmetricPD& m) {
  auto d = spectral_decompose(m);
  const double lo = d.eigenvalues(d.eigenvalues.size() - 1);
  if (lo <= 0) throw std::runtime_error("condition_number: singular input");
  return d.eigenvalues(0) / lo;
}

double condition_number(const Matrix& m) { return condition_number(SymmetricPD(m)); }

double riemannian_distance(const SymmetricPD& v1, const SymmetricPD& v2) {
  if (v1.dim() != v2.dim())
    throw std::invalid_argument("riemannian_distance: dimension mismatch");
  auto d1 = spectral_decompose(v1);
  Matrix inv_sqrt = d1.eigenvectors *
                    d1.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
                    d1.eigenvectors.transpose();
  Matrix w = inv_sqrt * v2.mat() * inv_sqrt;
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0)
    throw std::runtime_error("riemannian_distance: non-PD input");
  return es.eigenvalues().array().log().matrix().norm();
}

double riemannian_distance(const Matrix& v1, const Matrix& v2) {
  return riemannian_distance(SymmetricPD(v1), SymmetricPD(v2));
}

Matrix shape_of(const Matrix& m) {
  SymmetricPD check(m);  // rejects non-PD input
  const int q = check.dim();
  Matrix s = check.mat() * (static_cast<double>(q) / check.mat().trace());
  // renormalize once more so the trace is q to the last ulp
  s *= static_cast<double>(q) / s.trace();
  return s;
}

namespace {

bool subset_full_rank(const Matrix& rows, const std::vector<int>& idx) {
  Matrix sub(static_cast<Eigen::Index>(idx.size()), rows.cols());
  for (size_t i = 0; i < idx.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = rows.row(idx[i]);
  Eigen::ColPivHouseholderQR<Matrix> qr(sub.transpose());
  qr.setThreshold(1e-10);
  return qr.rank() == static_cast<Eigen::Index>(idx.size());
}

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= static_cast<double>(n - i) / (i + 1);
  return v;
}

}  // namespace

GeneralPositionResult check_general_position(const DataMatrix& x) {
  const int n = x.n();
  const int q = x.q();
  const int r = std::min(n, q);
  GeneralPositionResult out;
  // A rank-deficient subset of size < r extends to a rank-deficient
  // r-subset, so checking r-subsets suffices.
  if (binom(n, r) <= 1e6) {
    std::vector<int> idx(r);
    for (int i = 0; i < r; ++i) idx[i] = i;
    while (true) {
      if (!subset_full_rank(x.rows(), idx)) return out;
      int i = r - 1;
      while (i >= 0 && idx[i] == n - r + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
    out.in_general_position = true;
    return out;
  }
  out.probabilistic = true;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  for (int t = 0; t < 10000; ++t) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> idx(all.begin(), all.begin() + r);
    if (!subset_full_rank(x.rows(), idx)) return out;
  }
  out.in_general_position = true;
  return out;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("lower_median: empty");
  const size_t k = (values.size() - 1) / 2;  // ceil(n/2)-th order statistic
  std::nth_element(values.begin(), values.begin() + static_cast<long>(k), values.end());
  return values[k];
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace rrcov
