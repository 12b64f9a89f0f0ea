#include "rrcov/penalized.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "rrcov/core.hpp"

namespace rrcov {

namespace {

constexpr int kMaxIter = 2000;
constexpr double kStepTol = 1e-10;

// s_i = y_i^T Sigma^-1 y_i for all rows at once.
Eigen::ArrayXd quad_forms(const Matrix& y, const Matrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("solver: iterate lost positive definiteness");
  const Matrix b = llt.solve(y.transpose());  // q x n
  return (y.array() * b.transpose().array()).rowwise().sum();
}

struct IterationResult {
  Matrix sigma;
  int iterations = 0;
  double final_step = 0.0;
  bool converged = false;
};

template <typename RhsFn>
IterationResult fixed_point(const Matrix& start, RhsFn rhs) {
  IterationResult res;
  Matrix sigma = start;
  for (int it = 1; it <= kMaxIter; ++it) {
    const Matrix next = rhs(sigma);
    const double step = (next - sigma).norm() / std::max(sigma.norm(), 1e-300);
    sigma = next;
    res.iterations = it;
    res.final_step = step;
    if (step < kStepTol) {
      res.converged = true;
      break;
    }
  }
  res.sigma = std::move(sigma);
  return res;
}

// Weighted second moment (1/div) sum w(s_i) y_i y_i^T.
Matrix weighted_moment(const Matrix& y, const Eigen::ArrayXd& w, double div) {
  return (y.transpose() * w.matrix().asDiagonal() * y) / div;
}

}  // namespace

Matrix PenaltySpec::target_mat(int q) const {
  switch (target) {
    case Target::Identity:
      return Matrix::Identity(q, q);
    case Target::SigmaHat2:
      if (sigma2 <= 0) throw std::invalid_argument("PenaltySpec: sigma2 must be positive");
      return sigma2 * Matrix::Identity(q, q);
    case Target::Matrix:
      return SymmetricPD(target_matrix).mat();
  }
  throw std::logic_error("unreachable");
}

ScatterEstimate solve_penalized(const DataMatrix& x, const WeightFunction& weight,
                                const PenaltySpec& penalty) {
  const int q = x.q();
  if (penalty.kind == PenaltySpec::Kind::TylerBeta)
    return solve_tyler_beta(x, penalty.beta, penalty.gamma, penalty.target, penalty.sigma2);
  if (penalty.kind == PenaltySpec::Kind::TP && penalty.eta < 0)
    throw std::invalid_argument("solve_penalized: eta must be >= 0");
  if (penalty.kind == PenaltySpec::Kind::KL &&
      (penalty.gamma < 0 || penalty.gamma > 1))
    throw std::invalid_argument("solve_penalized: gamma must be in [0, 1]");

  const Matrix gamma_target = penalty.target_mat(q);
  // Whiten so the target becomes the identity.
  const SpectralDecomposition gd = spectral_decompose(SymmetricPD(gamma_target));
  const Matrix g_half = gd.eigenvectors * gd.eigenvalues.cwiseSqrt().asDiagonal() *
                        gd.eigenvectors.transpose();
  const Matrix g_inv_half = gd.eigenvectors *
                            gd.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
                            gd.eigenvectors.transpose();

  const bool tyler_weight = weight.kind() == WeightFunction::Kind::Tyler;
  const DataMatrix& rows = tyler_weight ? x.nonzero_rows() : x;
  const Matrix y = rows.rows() * g_inv_half;
  const double div = rows.n();

  const double eta = penalty.eta;
  const double gamma = penalty.gamma;
  const Matrix id = Matrix::Identity(q, q);
  auto rhs = [&](const Matrix& sigma) -> Matrix {
    if (penalty.kind == PenaltySpec::Kind::KL && gamma == 1.0) return id;
    const Eigen::ArrayXd s = quad_forms(y, sigma);
    const Eigen::ArrayXd w = weight.u(s);
    const Matrix m = weighted_moment(y, w, div);
    if (penalty.kind == PenaltySpec::Kind::TP) return m + eta * id;
    return (1.0 - gamma) * m + gamma * id;
  };

  IterationResult it = fixed_point(id, rhs);
  ScatterEstimate est;
  est.penalty = penalty;
  est.weight = weight;
  est.iterations = it.iterations;
  est.final_step = it.final_step;
  est.converged = it.converged;
  est.residual = (it.sigma - rhs(it.sigma)).norm() / it.sigma.norm();
  est.sigma = g_half * it.sigma * g_half;
  est.sigma = 0.5 * (est.sigma + est.sigma.transpose());
  return est;
}

ScatterEstimate solve_tyler_beta(const DataMatrix& x, double beta, double gamma,
                                 const PenaltySpec::Target target, double sigma2) {
  const int q = x.q();
  if (beta < 0 || beta >= q)
    throw std::invalid_argument("solve_tyler_beta: requires 0 <= beta < q");
  if (gamma <= 0 || gamma > 1)
    throw std::invalid_argument("solve_tyler_beta: requires 0 < gamma <= 1");
  if (beta >= 1) {
    const auto cond = check_condition_a(x, beta);
    if (!cond.holds)
      throw std::runtime_error("solve_tyler_beta: Condition A violated (subspace with " +
                               std::to_string(cond.witness_count) + " points, dim " +
                               std::to_string(cond.witness_dim) + ")");
  }
  PenaltySpec penalty = PenaltySpec::tyler_beta(beta, gamma);
  penalty.target = target;
  penalty.sigma2 = sigma2;
  const Matrix gamma_target = penalty.target_mat(q);
  const double scale = (target == PenaltySpec::Target::SigmaHat2) ? sigma2 : 1.0;

  const DataMatrix rows = x.nonzero_rows();
  const Matrix y = rows.rows() / std::sqrt(scale);
  const double div = rows.n();
  const Matrix id = Matrix::Identity(q, q);
  auto rhs = [&](const Matrix& sigma) -> Matrix {
    if (beta == 0.0) return gamma * id;
    const Eigen::ArrayXd s = quad_forms(y, sigma);
    return weighted_moment(y, (beta / s).eval(), div) + gamma * id;
  };

  IterationResult it = fixed_point(gamma * id, rhs);
  ScatterEstimate est;
  est.penalty = penalty;
  est.weight = WeightFunction::tyler(beta / std::max(1.0 - gamma, 1e-300));
  est.iterations = it.iterations;
  est.final_step = it.final_step;
  est.converged = it.converged;
  est.residual = (it.sigma - rhs(it.sigma)).norm() / it.sigma.norm();
  est.sigma = scale * it.sigma;
  return est;
}

ScatterEstimate tyler_shape(const DataMatrix& x) {
  const int q = x.q();
  const DataMatrix rows = x.nonzero_rows();
  const Matrix y = rows.rows();
  const double div = rows.n();
  auto rhs = [&](const Matrix& sigma) -> Matrix {
    const Eigen::ArrayXd s = quad_forms(y, sigma);
    const Matrix m = weighted_moment(y, (static_cast<double>(q) / s).eval(), div);
    return m * (static_cast<double>(q) / m.trace());
  };
  IterationResult it = fixed_point(Matrix::Identity(q, q), rhs);
  ScatterEstimate est;
  est.penalty = PenaltySpec::tyler_beta(0, 1);  // placeholder parameters
  est.penalty.beta = static_cast<double>(q);
  est.weight = WeightFunction::tyler(q);
  est.iterations = it.iterations;
  est.final_step = it.final_step;
  est.converged = it.converged;
  est.residual = (it.sigma - rhs(it.sigma)).norm() / it.sigma.norm();
  est.sigma = it.sigma;
  est.unregularized_endpoint = true;
  return est;
}

Matrix adjusted_v(const ScatterEstimate& est) {
  const int q = static_cast<int>(est.sigma.rows());
  const Matrix t = est.penalty.target_mat(q);
  switch (est.penalty.kind) {
    case PenaltySpec::Kind::TP:
      return est.sigma - est.penalty.eta * t;
    case PenaltySpec::Kind::KL:
    case PenaltySpec::Kind::TylerBeta: {
      const double g = est.penalty.gamma;
      if (g >= 1.0)
        throw std::invalid_argument(
            "adjusted_v: gamma = 1 has no V-form; use generalized_sscm");
      return (est.sigma - g * t) / (1.0 - g);
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

struct SubspaceScan {
  double beta_max;  // condition holds iff beta < beta_max
  bool probabilistic = false;
  int witness_dim = 0;
  int witness_count = 0;
};

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= static_cast<double>(n - i) / (i + 1);
  return v;
}

// For a d-subset of rows spanning dim d, counts how many rows lie in
// that subspace and folds d*n/count into the running minimum.
void scan_subset(const Matrix& rows, const std::vector<int>& idx, int n,
                 SubspaceScan* scan) {
  const int d = static_cast<int>(idx.size());
  Matrix sub(rows.cols(), d);
  for (int i = 0; i < d; ++i) sub.col(i) = rows.row(idx[i]).transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(sub);
  qr.setThreshold(1e-10);
  if (qr.rank() != d) return;  // lower-dimensional span, covered at smaller d
  const Matrix basis = qr.householderQ() * Matrix::Identity(rows.cols(), d);
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const Vector xi = rows.row(i).transpose();
    const Vector resid = xi - basis * (basis.transpose() * xi);
    if (resid.norm() <= 1e-9 * xi.norm()) ++count;
  }
  const double limit = static_cast<double>(d) * n / count;
  if (limit < scan->beta_max) {
    scan->beta_max = limit;
    scan->witness_dim = d;
    scan->witness_count = count;
  }
}

SubspaceScan scan_subspaces(const DataMatrix& x) {
  const DataMatrix nz = x.nonzero_rows();
  const int n = nz.n();
  const int q = nz.q();
  SubspaceScan scan;
  scan.beta_max = n;  // trivial bound from the full space
  double total = 0;
  for (int d = 1; d <= q - 1; ++d) total += binom(n, d);
  if (total <= 1e6) {
    for (int d = 1; d <= q - 1 && d <= n; ++d) {
      std::vector<int> idx(d);
      for (int i = 0; i < d; ++i) idx[i] = i;
      while (true) {
        scan_subset(nz.rows(), idx, n, &scan);
        int i = d - 1;
        while (i >= 0 && idx[i] == n - d + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
    return scan;
  }
  scan.probabilistic = true;
  std::mt19937_64 rng(0x6a09e667f3bcc908ull);
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  for (int d = 1; d <= q - 1 && d <= n; ++d) {
    for (int t = 0; t < 10000; ++t) {
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<int> idx(all.begin(), all.begin() + d);
      scan_subset(nz.rows(), idx, n, &scan);
    }
  }
  return scan;
}

}  // namespace

ConditionAResult check_condition_a(const DataMatrix& x, double beta) {
  if (beta < 0 || beta >= x.q())
    throw std::invalid_argument("check_condition_a: requires 0 <= beta < q");
  ConditionAResult res;
  if (beta < 1.0) {  // #points/n <= 1 < dim/beta always
    res.holds = true;
    return res;
  }
  const SubspaceScan scan = scan_subspaces(x);
  res.probabilistic = scan.probabilistic;
  res.holds = beta < scan.beta_max;
  if (!res.holds) {
    res.witness_dim = scan.witness_dim;
    res.witness_count = scan.witness_count;
  }
  return res;
}

double condition_a_beta_max(const DataMatrix& x) { return scan_subspaces(x).beta_max; }

Matrix scaled_scatter(const Matrix& shape, const DataMatrix& x) {
  const SymmetricPD s(shape);
  if (std::abs(s.mat().trace() - s.dim()) > 1e-8 * s.dim())
    throw std::invalid_argument("scaled_scatter: shape must have trace q");
  Eigen::LLT<Matrix> llt(s.mat());
  std::vector<double> forms(x.n());
  for (int i = 0; i < x.n(); ++i) {
    const Vector xi = x.row(i);
    forms[i] = xi.dot(llt.solve(xi));  // zero rows contribute 0
  }
  const double med = lower_median(forms);
  if (med <= 0) throw std::runtime_error("scaled_scatter: degenerate scale (median 0)");
  return (med / x.q()) * s.mat();
}

}  // namespace rrcov
