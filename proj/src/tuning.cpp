#include "rrcov/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rrcov/core.hpp"
#include "rrcov/sscm.hpp"

namespace rrcov {

namespace {

constexpr double kBetaEps = 1e-9;

// q log(x^T S^-1 x / x^T x) + log det S per nonzero observation.
std::vector<double> per_obs_values(const Matrix& shape, const DataMatrix& sample) {
  const int q = sample.q();
  Eigen::LLT<Matrix> llt(shape);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("cv criterion: candidate not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < q; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  std::vector<double> vals;
  vals.reserve(sample.n());
  for (int i = 0; i < sample.n(); ++i) {
    const Vector xi = sample.row(i);
    const double nrm2 = xi.squaredNorm();
    if (nrm2 == 0.0) continue;
    vals.push_back(q * std::log(xi.dot(llt.solve(xi)) / nrm2) + logdet);
  }
  if (vals.empty()) throw std::runtime_error("cv criterion: sample empty after zero-row removal");
  return vals;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

DataMatrix take_rows(const DataMatrix& x, const std::vector<int>& idx) {
  Matrix m(static_cast<Eigen::Index>(idx.size()), x.q());
  for (size_t i = 0; i < idx.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = x.rows().row(idx[i]);
  return DataMatrix(std::move(m));
}

}  // namespace

const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::CvMean: return "cvmean";
    case Criterion::CvMed: return "cvmed";
    case Criterion::CvMedMean: return "cvmedmean";
    case Criterion::CvMedMed: return "cvmedmed";
    case Criterion::AcgMean: return "acgmean";
    case Criterion::AcgMed: return "acgmed";
  }
  return "?";
}

FoldPlan kfold_split(int n, int k, std::uint64_t seed) {
  if (k < 2 || k > n) throw std::invalid_argument("kfold_split: requires 2 <= k <= n");
  std::vector<int> ids;
  ids.reserve(n);
  for (int i = 0; i < n; ++i) ids.push_back(i % k);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  return FoldPlan{n, k, std::move(ids), seed};
}

double cv_value(const Matrix& shape_candidate, const DataMatrix& sample) {
  return mean_of(per_obs_values(shape_candidate, sample));
}

double cvr_value(const Matrix& shape_candidate, const DataMatrix& sample) {
  return lower_median(per_obs_values(shape_candidate, sample));
}

Matrix fit_shape(const DataMatrix& x, double beta, EstimatorKind kind) {
  const int q = x.q();
  if (beta <= kBetaEps) {
    if (kind == EstimatorKind::SigmaShape) return Matrix::Identity(q, q);
    // V-shape limit at beta = 0 is the SSCM shape (fixed zero center).
    return shape_of(sscm(x, CenterSpec::known_center(Vector::Zero(q))).matrix *
                    (static_cast<double>(x.n()) / x.n_nonzero()));
  }
  if (beta >= q - kBetaEps) {
    const ScatterEstimate est = tyler_shape(x);
    if (!est.converged) throw std::runtime_error("fit_shape: Tyler endpoint did not converge");
    return shape_of(est.sigma);
  }
  const ScatterEstimate est = solve_tyler_beta(x, beta, 0.5);
  if (!est.converged) throw std::runtime_error("fit_shape: solver did not converge");
  if (kind == EstimatorKind::SigmaShape) return shape_of(est.sigma);
  return shape_of(adjusted_v(est));
}

CvCurve cv_curves(const DataMatrix& x, EstimatorKind kind, int k, std::uint64_t seed,
                  double grid_step) {
  const int n = x.n();
  const int q = x.q();
  if (n < 2 * k) throw std::invalid_argument("cv_curves: requires n >= 2k");
  CvCurve curve;
  curve.kind = kind;
  curve.plan = kfold_split(n, k, seed);

  const int steps = static_cast<int>(std::round(q / grid_step));
  for (int i = 0; i <= steps; ++i) curve.grid.push_back(std::min(i * grid_step, double(q)));
  for (Criterion c : kAllCriteria)
    curve.scores[c].assign(curve.grid.size(), std::nullopt);

  std::vector<DataMatrix> train, val;
  std::vector<double> fold_beta_max;
  for (int f = 0; f < k; ++f) {
    std::vector<int> ti, vi;
    for (int i = 0; i < n; ++i)
      (curve.plan.assignment[i] == f ? vi : ti).push_back(i);
    train.push_back(take_rows(x, ti));
    val.push_back(take_rows(x, vi));
    fold_beta_max.push_back(condition_a_beta_max(train.back()));
  }
  const double full_beta_max = condition_a_beta_max(x);

  for (size_t gi = 0; gi < curve.grid.size(); ++gi) {
    const double beta = curve.grid[gi];
    const bool needs_condition = beta >= 1.0 - kBetaEps;

    bool folds_ok = true;
    std::vector<double> fold_means, fold_medians, pooled;
    for (int f = 0; f < k && folds_ok; ++f) {
      if (needs_condition && beta >= fold_beta_max[f] - kBetaEps) {
        folds_ok = false;
        break;
      }
      try {
        const Matrix shape = fit_shape(train[f], beta, kind);
        const std::vector<double> vals = per_obs_values(shape, val[f]);
        fold_means.push_back(mean_of(vals));
        fold_medians.push_back(lower_median(vals));
        pooled.insert(pooled.end(), vals.begin(), vals.end());
      } catch (const std::exception&) {
        folds_ok = false;
      }
    }
    if (folds_ok) {
      curve.scores[Criterion::CvMean][gi] = mean_of(fold_means);
      curve.scores[Criterion::CvMedMean][gi] = mean_of(fold_medians);
      curve.scores[Criterion::CvMedMed][gi] = lower_median(fold_medians);
      curve.scores[Criterion::CvMed][gi] = lower_median(pooled);
    }

    if (!(needs_condition && beta >= full_beta_max - kBetaEps)) {
      try {
        const Matrix shape = fit_shape(x, beta, kind);
        const std::vector<double> vals = per_obs_values(shape, x);
        curve.scores[Criterion::AcgMean][gi] = mean_of(vals);
        curve.scores[Criterion::AcgMed][gi] = lower_median(vals);
      } catch (const std::exception&) {
      }
    }
  }
  return curve;
}

TuningResult select_beta(const CvCurve& curve, Criterion criterion, const DataMatrix& x) {
  const auto& scores = curve.scores.at(criterion);
  std::optional<size_t> best;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i]) continue;
    if (!best || *scores[i] < *scores[*best]) best = i;  // ties: smallest beta
  }
  if (!best) throw std::runtime_error("select_beta: all scores missing");
  TuningResult res;
  res.beta_star = curve.grid[*best];
  res.criterion = criterion;
  res.shape = fit_shape(x, res.beta_star, curve.kind);
  res.condition_number = condition_number(res.shape);
  return res;
}

TuningResult tilde_beta(const DataMatrix& x, EstimatorKind kind, double grid_step) {
  const int q = x.q();
  const double beta_max = condition_a_beta_max(x);
  const int steps = static_cast<int>(std::round(q / grid_step));
  std::optional<double> best_score;
  double best_beta = 0.0;
  Matrix best_shape;
  for (int i = 0; i <= steps; ++i) {
    const double beta = std::min(i * grid_step, double(q));
    if (beta >= 1.0 - kBetaEps && beta >= beta_max - kBetaEps) continue;
    try {
      const Matrix shape = fit_shape(x, beta, kind);
      const double score = cvr_value(shape, x);
      if (!best_score || score < *best_score) {
        best_score = score;
        best_beta = beta;
        best_shape = shape;
      }
    } catch (const std::exception&) {
    }
  }
  if (!best_score) throw std::runtime_error("tilde_beta: no admissible grid point");
  TuningResult res;
  res.beta_star = best_beta;
  res.criterion = Criterion::AcgMed;
  res.shape = best_shape;
  res.condition_number = condition_number(res.shape);
  return res;
}

}  // namespace rrcov
