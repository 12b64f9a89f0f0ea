#include "rrcov/population.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "rrcov/core.hpp"

namespace rrcov {

void EllipticalModel::validate() const {
  if (q < 1 || sigma_o_eigenvalues.size() != q)
    throw std::invalid_argument("EllipticalModel: eigenvalue count must equal q");
  for (int j = 0; j < q; ++j) {
    if (sigma_o_eigenvalues(j) <= 0)
      throw std::invalid_argument("EllipticalModel: eigenvalues must be positive");
    if (j > 0 && sigma_o_eigenvalues(j) > sigma_o_eigenvalues(j - 1))
      throw std::invalid_argument("EllipticalModel: eigenvalues must be descending");
  }
  if (radial == Radial::StudentT && radial_param <= 0)
    throw std::invalid_argument("EllipticalModel: StudentT dof must be positive");
  if (radial == Radial::PointMass && radial_param <= 0)
    throw std::invalid_argument("EllipticalModel: PointMass radius must be positive");
}

EllipticalModel EllipticalModel::normal(Vector eigenvalues) {
  EllipticalModel m;
  m.q = static_cast<int>(eigenvalues.size());
  m.sigma_o_eigenvalues = std::move(eigenvalues);
  m.radial = Radial::Normal;
  m.validate();
  return m;
}

EllipticalModel EllipticalModel::student_t(Vector eigenvalues, double dof) {
  EllipticalModel m = normal(std::move(eigenvalues));
  m.radial = Radial::StudentT;
  m.radial_param = dof;
  m.validate();
  return m;
}

EllipticalModel EllipticalModel::point_mass(Vector eigenvalues, double radius) {
  EllipticalModel m = normal(std::move(eigenvalues));
  m.radial = Radial::PointMass;
  m.radial_param = radius;
  m.validate();
  return m;
}

Matrix EllipticalModel::sigma_o() const {
  validate();
  const Matrix p = eigenvectors.size() == 0 ? Matrix::Identity(q, q) : eigenvectors;
  return p * sigma_o_eigenvalues.asDiagonal() * p.transpose();
}

Matrix sample_spherical(const EllipticalModel& model, int n, std::uint64_t seed) {
  model.validate();
  const int q = model.q;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // chi-square via gamma(q/2, 2): the Normal radial law is chi_q
  std::gamma_distribution<double> chisq_q(q / 2.0, 2.0);
  std::gamma_distribution<double> chisq_dof(model.radial_param / 2.0, 2.0);
  Matrix z(n, q);
  for (int i = 0; i < n; ++i) {
    Vector g(q);
    for (int j = 0; j < q; ++j) g(j) = gauss(rng);
    const Vector u = g / g.norm();
    double r = 0.0;
    switch (model.radial) {
      case EllipticalModel::Radial::Normal:
        r = std::sqrt(chisq_q(rng));
        break;
      case EllipticalModel::Radial::StudentT:
        r = std::sqrt(chisq_q(rng) * model.radial_param / chisq_dof(rng));
        break;
      case EllipticalModel::Radial::PointMass:
        r = model.radial_param;
        break;
    }
    z.row(i) = (r * u).transpose();
  }
  return z;
}

Matrix sample_elliptical(const EllipticalModel& model, int n, std::uint64_t seed) {
  const Matrix z = sample_spherical(model, n, seed);
  const Matrix p = model.eigenvectors.size() == 0 ? Matrix::Identity(model.q, model.q)
                                                  : model.eigenvectors;
  const Matrix root =
      p * model.sigma_o_eigenvalues.cwiseSqrt().asDiagonal() * p.transpose();
  return z * root;  // rows x_i = root z_i (root symmetric)
}

PopulationSolution solve_lambda_system(const EllipticalModel& model,
                                       const WeightFunction& weight, double gamma,
                                       int n_draws, std::uint64_t seed, bool symmetrize) {
  if (gamma <= 0 || gamma > 1)
    throw std::invalid_argument("solve_lambda_system: requires 0 < gamma <= 1");
  model.validate();
  const int q = model.q;
  const Matrix z = sample_spherical(model, n_draws, seed);
  Matrix zsq = z.array().square().matrix();  // n x q, frozen sample
  if (symmetrize) {
    // append every cyclic coordinate shift of each draw
    Matrix aug(static_cast<Eigen::Index>(n_draws) * q, q);
    for (int s = 0; s < q; ++s)
      for (int j = 0; j < q; ++j)
        aug.block(static_cast<Eigen::Index>(s) * n_draws, j, n_draws, 1) =
            zsq.col((j + s) % q);
    zsq = std::move(aug);
    n_draws *= q;
  }

  const Vector& lo = model.sigma_o_eigenvalues;
  Vector lambda = lo;
  PopulationSolution sol;
  sol.gamma = gamma;
  sol.mc_draws = n_draws;
  sol.seed = seed;

  const int kMaxIter = 5000;
  const double kTol = 1e-9;
  auto step = [&](const Vector& lam) -> Vector {
    const Vector ratio = lo.cwiseQuotient(lam);
    const Eigen::ArrayXd s = (zsq * ratio).array();
    const Eigen::ArrayXd w = weight.u(s);
    const Vector moments = zsq.transpose() * w.matrix() / n_draws;
    return (1.0 - gamma) * lo.cwiseProduct(moments) + gamma * Vector::Ones(q);
  };
  for (int it = 1; it <= kMaxIter; ++it) {
    const Vector next = step(lambda);
    const double change = ((next - lambda).cwiseQuotient(lambda)).cwiseAbs().maxCoeff();
    lambda = next;
    sol.iterations = it;
    if (change < kTol) {
      sol.converged = true;
      break;
    }
  }
  sol.residual = ((step(lambda) - lambda).cwiseQuotient(lambda)).cwiseAbs().maxCoeff();
  sol.lambda = lambda;
  sol.lambda_v = Vector(q);
  for (int j = 0; j < q; ++j) {
    const double lv = (lambda(j) - gamma) / (1.0 - gamma);
    if (gamma < 1.0 && lv < 0)
      throw std::runtime_error("solve_lambda_system: negative lambda_v (Monte Carlo noise)");
    sol.lambda_v(j) = gamma < 1.0 ? lv : std::nan("");
  }
  return sol;
}

std::vector<PopulationCell> population_table(const std::vector<EllipticalModel>& models,
                                             const std::vector<double>& kappas,
                                             const std::vector<double>& gammas,
                                             int n_draws, std::uint64_t seed) {
  std::vector<PopulationCell> cells;
  for (size_t mi = 0; mi < models.size(); ++mi)
    for (double kappa : kappas)
      for (double gamma : gammas) {
        PopulationCell c;
        c.model_index = static_cast<int>(mi);
        c.kappa = kappa;
        c.gamma = gamma;
        cells.push_back(c);
      }

  auto run_cell = [&](size_t idx) {
    PopulationCell& c = cells[idx];
    try {
      const WeightFunction w = WeightFunction::t_shift(c.kappa, 2.0);
      const auto sol = solve_lambda_system(models[static_cast<size_t>(c.model_index)], w,
                                           c.gamma, n_draws, mix_seed(seed, idx));
      const int q = models[static_cast<size_t>(c.model_index)].q;
      c.cn_sigma = sol.lambda(0) / sol.lambda(q - 1);
      if (c.gamma < 1.0) c.cn_v = sol.lambda_v(0) / sol.lambda_v(q - 1);
      if (!sol.converged) c.error = "not converged";
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  };

  int threads = 0;
  if (const char* env = std::getenv("RRCOV_PARALLEL")) threads = std::atoi(env);
  if (threads <= 1) {
    for (size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
    for (auto& t : pool) t.join();
  }
  return cells;
}

}  // namespace rrcov
