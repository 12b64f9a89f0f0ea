#ifndef RRCOV_TUNING_HPP
#define RRCOV_TUNING_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "rrcov/penalized.hpp"
#include "rrcov/types.hpp"

namespace rrcov {

struct FoldPlan {
  int n = 0;
  int k = 0;
  std::vector<int> assignment;  // fold id in {0..k-1} per observation
  std::uint64_t seed = 0;
};

// Uniformly random balanced partition; fold sizes differ by at most 1;
// deterministic in (n, k, seed).
FoldPlan kfold_split(int n, int k, std::uint64_t seed);

// The six validation criteria. cvmean: mean of per-fold CV means.
// cvmed: lower median of all n per-observation values pooled across
// folds. cvmedmean / cvmedmed: mean / lower median of the per-fold
// CV_R medians. acgmean / acgmed: CV / CV_R of the full-data fit
// scored on the full data.
enum class Criterion { CvMean, CvMed, CvMedMean, CvMedMed, AcgMean, AcgMed };

constexpr std::array<Criterion, 6> kAllCriteria = {
    Criterion::CvMean, Criterion::CvMed,   Criterion::CvMedMean,
    Criterion::CvMedMed, Criterion::AcgMean, Criterion::AcgMed};

const char* criterion_name(Criterion c);

enum class EstimatorKind { SigmaShape, VShape };

// Angular-central-Gaussian negative log-likelihood of a candidate
// shape on a validation sample (zero rows excluded):
// (q/r) sum log(x^T S^-1 x / x^T x) + log det S.
double cv_value(const Matrix& shape_candidate, const DataMatrix& sample);

// Median variant: lower median over i of
// q log(x_i^T S^-1 x_i / x_i^T x_i) + log det S.
double cvr_value(const Matrix& shape_candidate, const DataMatrix& sample);

struct CvCurve {
  std::vector<double> grid;  // beta values, ascending, step 0.1 over [0, q]
  std::map<Criterion, std::vector<std::optional<double>>> scores;
  EstimatorKind kind = EstimatorKind::SigmaShape;
  FoldPlan plan;
};

// The trace-q shape candidate at a grid point: identity (Sigma kind) or
// the SSCM shape (V kind) at beta = 0, the flagged trace-normalized
// Tyler fit at beta = q, the regularized Tyler solution in between.
// Throws on Condition A violation or non-convergence.
Matrix fit_shape(const DataMatrix& x, double beta, EstimatorKind kind);

// Evaluates all six criteria over the beta grid. X must already be
// centered. Fits that fail Condition A or do not converge are recorded
// as missing, never interpolated.
CvCurve cv_curves(const DataMatrix& x, EstimatorKind kind, int k, std::uint64_t seed,
                  double grid_step = 0.1);

struct TuningResult {
  double beta_star = 0.0;
  Criterion criterion = Criterion::CvMedMed;
  Matrix shape;
  double condition_number = 1.0;
};

// Smallest grid value attaining the minimum score; refits on all of x.
TuningResult select_beta(const CvCurve& curve, Criterion criterion, const DataMatrix& x);

// The subsample-free selector: argmin over the grid of CV_R of the
// full-data fit, evaluated on the full data.
TuningResult tilde_beta(const DataMatrix& x, EstimatorKind kind, double grid_step = 0.1);

}  // namespace rrcov

#endif
