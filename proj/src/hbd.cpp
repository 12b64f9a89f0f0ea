#include "rrcov/hbd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "rrcov/core.hpp"
#include "rrcov/location.hpp"
#include "rrcov/penalized.hpp"
#include "rrcov/sscm.hpp"

namespace rrcov {

double acg_deviance(const Vector& z, const Matrix& shape) {
  if (z.squaredNorm() == 0.0)
    throw std::invalid_argument("acg_deviance: z must be nonzero");
  Eigen::LLT<Matrix> llt(shape);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("acg_deviance: shape not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < shape.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return shape.rows() * std::log(z.dot(llt.solve(z))) + logdet;
}

double d_value(const Vector& z, const Matrix& shape) {
  return acg_deviance(z, shape) - shape.rows() * std::log(z.squaredNorm());
}

namespace {

double row_median(const DataMatrix& z, const Matrix& shape,
                  double (*per_row)(const Vector&, const Matrix&), const char* who) {
  std::vector<double> vals;
  vals.reserve(z.n());
  for (int i = 0; i < z.n(); ++i) {
    const Vector zi = z.row(i);
    if (zi.squaredNorm() == 0.0) continue;
    vals.push_back(per_row(zi, shape));
  }
  if (vals.empty()) throw std::invalid_argument(std::string(who) + ": all rows are zero");
  return lower_median(vals);
}

}  // namespace

double D_value(const DataMatrix& z, const Matrix& shape) {
  return row_median(z, shape, &d_value, "D_value");
}

double objective_R(const DataMatrix& z, const Matrix& shape) {
  return row_median(z, shape, &acg_deviance, "objective_R");
}

namespace {

// Parameter vector <-> trace-q shape. Log-Cholesky with L(0,0) fixed
// to 1 (the objective is scale-blind); candidates are projected to the
// condition-number cap so the search stays on a compact set.
struct ShapeParam {
  int q;
  double cn_cap;
  int dim() const { return q * (q + 1) / 2 - 1; }

  Matrix shape(const Vector& theta) const {
    Matrix l = Matrix::Zero(q, q);
    l(0, 0) = 1.0;
    int k = 0;
    for (int i = 1; i < q; ++i)
      l(i, i) = std::exp(std::clamp(theta(k++), -20.0, 20.0));
    for (int i = 1; i < q; ++i)
      for (int j = 0; j < i; ++j) l(i, j) = std::clamp(theta(k++), -1e6, 1e6);
    Matrix s = l * l.transpose();
    s *= static_cast<double>(q) / s.trace();
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const double floor = es.eigenvalues().maxCoeff() / cn_cap;
    if (es.eigenvalues().minCoeff() < floor) {
      Vector ev = es.eigenvalues().cwiseMax(floor);
      s = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      s *= static_cast<double>(q) / s.trace();
    }
    return 0.5 * (s + s.transpose());
  }

  Vector theta(const Matrix& shape_in) const {
    Eigen::LLT<Matrix> llt(shape_in);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("ShapeParam: start not positive definite");
    Matrix l = llt.matrixL();
    l /= l(0, 0);  // objective is scale-blind
    Vector t(dim());
    int k = 0;
    for (int i = 1; i < q; ++i) t(k++) = std::log(l(i, i));
    for (int i = 1; i < q; ++i)
      for (int j = 0; j < i; ++j) t(k++) = l(i, j);
    return t;
  }
};

struct NmResult {
  Vector x;
  double f = 0.0;
};

// Standard Nelder-Mead (reflection/expansion/contraction/shrink).
NmResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& start,
                     double step, int max_evals) {
  const int n = static_cast<int>(start.size());
  std::vector<Vector> xs(n + 1, start);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i) xs[i](i - 1) += step;
  int evals = 0;
  for (int i = 0; i <= n; ++i) fs[i] = (++evals, f(xs[i]));

  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Vector> nx(n + 1);
    std::vector<double> nf(n + 1);
    for (int i = 0; i <= n; ++i) {
      nx[i] = xs[idx[i]];
      nf[i] = fs[idx[i]];
    }
    xs = std::move(nx);
    fs = std::move(nf);
  };

  while (evals < max_evals) {
    order();
    if (fs[n] - fs[0] < 1e-10) break;
    Vector centroid = Vector::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[i];
    centroid /= n;

    const Vector xr = centroid + (centroid - xs[n]);
    const double fr = (++evals, f(xr));
    if (fr < fs[0]) {
      const Vector xe = centroid + 2.0 * (centroid - xs[n]);
      const double fe = (++evals, f(xe));
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
    } else {
      const bool outside = fr < fs[n];
      const Vector xc = outside ? Vector(centroid + 0.5 * (xr - centroid))
                                : Vector(centroid - 0.5 * (centroid - xs[n]));
      const double fc = (++evals, f(xc));
      if (fc < std::min(fr, fs[n])) {
        xs[n] = xc;
        fs[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = (++evals, f(xs[i]));
        }
      }
    }
  }
  order();
  return NmResult{xs[0], fs[0]};
}

// Concentration refinement: refit the Tyler shape on the half-subset
// with the smallest deviances and keep the refit while the median
// objective improves. Deviance ranking and the Tyler fit are both
// exactly equivariant, so these starts land in corresponding basins
// for linearly transformed data.
Matrix concentrate(const DataMatrix& x, Matrix s) {
  const int n = x.n();
  const int h = (n - 1) / 2 + 1;  // points at or below the lower median
  double best = objective_R(x, s);
  for (int round = 0; round < 50; ++round) {
    std::vector<std::pair<double, int>> dev;
    dev.reserve(n);
    for (int i = 0; i < n; ++i) {
      const Vector xi = x.row(i);
      if (xi.squaredNorm() == 0.0) continue;
      dev.emplace_back(acg_deviance(xi, s), i);
    }
    if (static_cast<int>(dev.size()) < h) break;
    std::nth_element(dev.begin(), dev.begin() + h - 1, dev.end());
    Matrix sub(h, x.q());
    for (int i = 0; i < h; ++i) sub.row(i) = x.rows().row(dev[i].second);
    Matrix refit;
    try {
      refit = shape_of(tyler_shape(DataMatrix(sub)).sigma);
    } catch (const std::exception&) {
      break;
    }
    const double val = objective_R(x, refit);
    if (val < best - 1e-12) {
      best = val;
      s = refit;
    } else {
      break;
    }
  }
  return s;
}

}  // namespace

HbdResult sigma_R(const DataMatrix& x, const HbdOptions& options) {
  const int q = x.q();
  if (q > 6) throw std::invalid_argument("sigma_R: q <= 6 enforced (desk-scale estimator)");
  Eigen::ColPivHouseholderQR<Matrix> qr(x.rows());
  qr.setThreshold(1e-10);
  if (qr.rank() < q) throw std::invalid_argument("sigma_R: data do not span R^q");

  const ShapeParam param{q, options.cn_cap};
  auto objective = [&](const Vector& theta) { return objective_R(x, param.shape(theta)); };

  // Warm starts from the estimator family itself (plus their
  // concentration refinements), then random jitter.
  std::vector<Matrix> starts;
  starts.push_back(Matrix::Identity(q, q));
  try {
    starts.push_back(
        shape_of(sscm(x, CenterSpec::known_center(Vector::Zero(q))).matrix));
  } catch (const std::exception&) {
  }
  try {
    starts.push_back(shape_of(tyler_shape(x).sigma));
  } catch (const std::exception&) {
  }
  for (double frac : {0.25, 0.5, 0.75}) {
    try {
      starts.push_back(shape_of(solve_tyler_beta(x, frac * q, 0.5).sigma));
    } catch (const std::exception&) {
    }
  }
  const size_t base_count = starts.size();
  for (size_t i = 0; i < base_count; ++i) {
    const Matrix refined = concentrate(x, starts[i]);
    if ((refined - starts[i]).norm() > 1e-10) starts.push_back(refined);
  }

  HbdResult res;
  res.restarts = options.restarts;
  bool have_best = false;
  Vector best_theta;
  for (int r = 0; r < options.restarts; ++r) {
    Vector theta0;
    if (r < static_cast<int>(starts.size())) {
      theta0 = param.theta(starts[r]);
    } else {
      std::mt19937_64 rng(mix_seed(options.seed, static_cast<std::uint64_t>(r)));
      std::normal_distribution<double> jitter(0.0, 0.5);
      const Matrix base = starts[r % starts.size()];
      theta0 = param.theta(base);
      for (int i = 0; i < theta0.size(); ++i) theta0(i) += jitter(rng);
    }
    // Iterated rounds with a fresh, shrinking simplex escape the
    // plateaus of the piecewise-flat median objective.
    NmResult nm{theta0, objective(theta0)};
    for (double step : {0.25, 0.1, 0.04}) {
      const NmResult next = nelder_mead(objective, nm.x, step, options.max_evals);
      if (next.f < nm.f) nm = next;
    }
    res.restart_values.push_back(nm.f);
    if (!have_best || nm.f < res.objective_value) {
      have_best = true;
      res.objective_value = nm.f;
      best_theta = nm.x;
    }
  }
  // Final polish from the overall best.
  for (double step : {0.02, 0.005}) {
    const NmResult next = nelder_mead(objective, best_theta, step, options.max_evals);
    if (next.f < res.objective_value) {
      res.objective_value = next.f;
      best_theta = next.x;
    }
  }
  res.shape = param.shape(best_theta);
  res.objective_value = objective_R(x, res.shape);
  return res;
}

Matrix sigma_sc_R(const DataMatrix& x, const HbdOptions& options) {
  const HbdResult r = sigma_R(x, options);
  return scaled_scatter(r.shape, x);
}

AffineLocScatter affine_location_scatter(const DataMatrix& x, const HbdOptions& options) {
  const int q = x.q();
  if (q + 1 > 6) throw std::invalid_argument("affine_location_scatter: q + 1 <= 6 enforced");
  Matrix aug(x.n(), q + 1);
  aug.leftCols(q) = x.rows();
  aug.col(q).setOnes();
  const Matrix m = sigma_sc_R(DataMatrix(aug), options);

  AffineLocScatter out;
  out.alpha = m(q, q);
  if (out.alpha <= 0)
    throw std::runtime_error("affine_location_scatter: alpha <= 0 (optimizer failure)");
  out.mu = m.topRightCorner(q, 1) / out.alpha;
  out.sigma = m.topLeftCorner(q, q) - out.alpha * out.mu * out.mu.transpose();
  return out;
}

}  // namespace rrcov
