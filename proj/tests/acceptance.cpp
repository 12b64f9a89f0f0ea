// Acceptance gate: one line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rrcov/core.hpp"
#include "rrcov/harness.hpp"
#include "rrcov/hbd.hpp"
#include "rrcov/location.hpp"
#include "rrcov/penalized.hpp"
#include "rrcov/population.hpp"
#include "rrcov/sscm.hpp"
#include "rrcov/tuning.hpp"

using namespace rrcov;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail = "") {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

Matrix random_normal(int n, int q, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < q; ++j) m(i, j) = g(rng);
  return m;
}

// ---------------------------------------------------------------- 1
void criterion_table() {
  Vector ev1(5), ev2(5);
  ev1 << 10, 1, 1, 1, 1;
  for (int i = 0; i < 5; ++i) ev2(i) = 10.0 - 2.25 * i;  // uniform 10..1
  const std::vector<EllipticalModel> models{EllipticalModel::normal(ev1),
                                            EllipticalModel::normal(ev2)};
  const std::vector<double> kappas{0.5, 1, 3, 5, 8};
  const std::vector<double> gammas{0.05, 0.2, 0.5, 0.8, 0.95};
  // printed q=5 condition numbers, row-major (model, kappa, gamma)
  const double printed_s[2][5][5] = {
      {{1.22, 1.17, 1.09, 1.03, 1.00},
       {1.53, 1.40, 1.21, 1.07, 1.01},
       {4.00, 2.92, 1.81, 1.24, 1.05},
       {7.38, 5.03, 2.66, 1.43, 1.08},
       {9.38, 7.43, 4.12, 1.79, 1.14}},
      {{1.13, 1.11, 1.06, 1.02, 1.00},
       {1.31, 1.24, 1.13, 1.04, 1.01},
       {2.66, 2.11, 1.50, 1.15, 1.03},
       {6.36, 3.87, 2.04, 1.28, 1.06},
       {9.33, 7.03, 3.27, 1.51, 1.10}}};
  const double printed_v[2][5][5] = {
      {{4.91, 5.03, 5.19, 5.30, 5.35},
       {5.37, 5.39, 5.39, 5.38, 5.37},
       {7.65, 7.09, 6.29, 5.68, 5.44},
       {9.31, 8.49, 7.20, 6.01, 5.51},
       {9.94, 9.49, 8.27, 6.51, 5.62}},
      {{5.91, 5.99, 6.12, 6.22, 6.26},
       {6.10, 6.15, 6.22, 6.26, 6.27},
       {7.22, 6.98, 6.65, 6.41, 6.31},
       {8.99, 8.10, 7.16, 6.57, 6.34},
       {9.92, 9.38, 8.01, 6.83, 6.40}}};

  const auto cells = population_table(models, kappas, gammas, 100000, 1);
  bool ok = true;
  std::string worst;
  double worst_err = 0.0;
  for (const auto& c : cells) {
    if (!c.error.empty() || !c.cn_sigma || !c.cn_v) {
      ok = false;
      worst = "cell failed: " + c.error;
      continue;
    }
    int ki = 0, gi = 0;
    for (int i = 0; i < 5; ++i) {
      if (kappas[i] == c.kappa) ki = i;
      if (gammas[i] == c.gamma) gi = i;
    }
    const double es =
        std::abs(*c.cn_sigma - printed_s[c.model_index][ki][gi]) / printed_s[c.model_index][ki][gi];
    const double evv =
        std::abs(*c.cn_v - printed_v[c.model_index][ki][gi]) / printed_v[c.model_index][ki][gi];
    const double e = std::max(es, evv);
    if (e > worst_err) {
      worst_err = e;
      std::ostringstream os;
      os << "max rel err " << e << " at model " << c.model_index + 1 << ", kappa "
         << c.kappa << ", gamma " << c.gamma;
      worst = os.str();
    }
    if (e > 0.15) ok = false;
  }
  report(1, "condition-number table, q=5 block within 15%", ok, worst);
}

// ---------------------------------------------------------------- 2
void criterion_analytic() {
  bool ok = true;
  std::string detail;
  // population: Sigma_o = I, Tyler weight => gamma q / (q - (1-gamma) kappa)
  for (const auto& [kappa, gamma] : std::vector<std::pair<double, double>>{
           {5.0, 0.5}, {2.0, 0.25}, {1.0, 0.9}}) {
    const auto sol = solve_lambda_system(EllipticalModel::normal(Vector::Ones(5)),
                                         WeightFunction::tyler(kappa), gamma, 20000, 3,
                                         /*symmetrize=*/true);
    const double expect = gamma * 5.0 / (5.0 - (1.0 - gamma) * kappa);
    for (int j = 0; j < 5; ++j)
      if (std::abs(sol.lambda(j) - expect) > 1e-8) {
        ok = false;
        detail = "population fixed point off";
      }
  }
  // sample: standard basis => (gamma q/(q - beta)) I
  for (int q : {2, 3, 5}) {
    const DataMatrix x(Matrix::Identity(q, q));
    const double beta = 0.5 * q, gamma = 0.4;
    const auto est = solve_tyler_beta(x, beta, gamma);
    const Matrix expect = (gamma * q / (q - beta)) * Matrix::Identity(q, q);
    if ((est.sigma - expect).norm() / expect.norm() > 1e-8) {
      ok = false;
      detail = "sample fixed point off at q=" + std::to_string(q);
    }
  }
  const auto tp = solve_penalized(DataMatrix(Matrix::Identity(2, 2)),
                                  WeightFunction::tyler(1.0), PenaltySpec::tp(1.0));
  if ((tp.sigma - 2.0 * Matrix::Identity(2, 2)).norm() > 1e-8) {
    ok = false;
    detail = "TP basis fixed point off";
  }
  report(2, "analytic fixed points to 1e-8", ok, detail);
}

// ---------------------------------------------------------------- 3
void criterion_bounds() {
  std::mt19937_64 rng(77);
  bool ok = true;
  std::string detail;
  for (int t = 0; t < 200 && ok; ++t) {
    const int q = 2 + static_cast<int>(rng() % 5);
    const int n = q + 1 + static_cast<int>(rng() % (60 - q));
    const DataMatrix x(random_normal(n, q, rng));
    const double kappa = (t % 2 == 0) ? 0.3 : 0.7;
    const auto w = WeightFunction::t_shift(kappa);

    const double eta = 0.25 + 0.5 * (t % 3);
    const auto tp = solve_penalized(x, w, PenaltySpec::tp(eta));
    Eigen::SelfAdjointEigenSolver<Matrix> es(tp.sigma);
    if (es.eigenvalues().minCoeff() < eta - 1e-9 ||
        es.eigenvalues().maxCoeff() > eta / (1.0 - kappa) + 1e-9) {
      ok = false;
      detail = "TP bound violated at case " + std::to_string(t);
    }

    const double gamma = 0.2 + 0.3 * (t % 3);
    const auto kl = solve_penalized(x, w, PenaltySpec::kl(gamma));
    Eigen::SelfAdjointEigenSolver<Matrix> ek(kl.sigma);
    if (ek.eigenvalues().minCoeff() < gamma - 1e-9 ||
        ek.eigenvalues().maxCoeff() > gamma / (1.0 - (1.0 - gamma) * kappa) + 1e-9) {
      ok = false;
      detail = "KL bound violated at case " + std::to_string(t);
    }
  }
  report(3, "penalized spectrum bounds on 200 datasets", ok, detail);
}

// ---------------------------------------------------------------- 4
void criterion_identities() {
  std::mt19937_64 rng(99);
  bool ok = true;
  std::string detail;
  for (int t = 0; t < 50 && ok; ++t) {
    const int q = 2 + static_cast<int>(rng() % 3);
    const DataMatrix x(random_normal(20 + static_cast<int>(rng() % 20), q, rng));

    const double eta = 0.2 + 0.1 * (t % 5);
    const double gamma = eta / (1.0 + eta);
    const double kappa = 0.6;
    const auto u1 = WeightFunction::t_shift(kappa);
    const auto u2 = WeightFunction::custom(
        [kappa, gamma](double s) { return kappa / ((1.0 - gamma) * s + 2.0); }, true);
    const auto tp = solve_penalized(x, u1, PenaltySpec::tp(eta));
    const auto kl = solve_penalized(x, u2, PenaltySpec::kl(gamma));
    if ((kl.sigma - (1.0 - gamma) * tp.sigma).norm() / kl.sigma.norm() > 1e-8) {
      ok = false;
      detail = "TP/KL correspondence failed at case " + std::to_string(t);
    }

    const double beta = 0.3 + 0.4 * (t % 4);
    const auto a = solve_tyler_beta(x, beta, 0.2);
    const auto b = solve_tyler_beta(x, beta, 0.7);
    if ((a.sigma - (0.2 / 0.7) * b.sigma).norm() / a.sigma.norm() > 1e-8) {
      ok = false;
      detail = "gamma scaling failed";
    }
    if ((shape_of(a.sigma) - shape_of(b.sigma)).norm() / q > 1e-8) {
      ok = false;
      detail = "shape invariance failed";
    }
  }
  report(4, "equivalence and scaling identities to 1e-8 on 50 datasets", ok, detail);
}

// ---------------------------------------------------------------- 5
void criterion_cv_invariances() {
  std::mt19937_64 rng(111);
  std::uniform_real_distribution<double> uc(0.1, 10.0);
  bool ok = true;
  std::string detail;
  for (int t = 0; t < 100 && ok; ++t) {
    const int q = 2 + static_cast<int>(rng() % 4);
    const DataMatrix x(random_normal(10 + static_cast<int>(rng() % 30), q, rng));
    Matrix a = random_normal(q, q, rng);
    const Matrix s = a * a.transpose() + Matrix::Identity(q, q);

    if (std::abs(cv_value(Matrix::Identity(q, q), x)) > 1e-12 ||
        std::abs(cvr_value(Matrix::Identity(q, q), x)) > 1e-12) {
      ok = false;
      detail = "identity candidate not zero";
    }
    const double lam = uc(rng);
    if (std::abs(cv_value(lam * s, x) - cv_value(s, x)) > 1e-10 ||
        std::abs(cvr_value(lam * s, x) - cvr_value(s, x)) > 1e-10) {
      ok = false;
      detail = "candidate-scale invariance failed";
    }
    Matrix scaled = x.rows();
    for (int i = 0; i < scaled.rows(); ++i) scaled.row(i) *= uc(rng);
    if (std::abs(cv_value(s, DataMatrix(scaled)) - cv_value(s, x)) > 1e-10 ||
        std::abs(cvr_value(s, DataMatrix(scaled)) - cvr_value(s, x)) > 1e-10) {
      ok = false;
      detail = "per-point scale invariance failed";
    }
  }
  report(5, "cv criteria invariances to 1e-10 on 100 cases", ok, detail);
}

// ---------------------------------------------------------------- 6
void criterion_figures() {
  // published setting with covariance diag(10,1,1,1,1): the anisotropic
  // case has an interior clean optimum, so the robust criterion's
  // selection window is a stable prediction across seeds
  int mean_hits = 0, med_hits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(mix_seed(1234, seed));
    Matrix c0 = random_normal(35, 5, rng);
    c0.col(0) *= std::sqrt(10.0);
    const DataMatrix clean(c0);
    const auto scheme = ContaminationScheme::symmetric_cluster(
        Vector::Constant(5, 5.0), 0.1, 10, ContaminationScheme::Mode::Replace,
        mix_seed(99, seed));
    const DataMatrix z = contaminate(clean, scheme);
    const DataMatrix centered = center_data(z, CenterSpec::spatial_median());
    const CvCurve curve =
        cv_curves(centered, EstimatorKind::SigmaShape, 5, mix_seed(7, seed));
    try {
      // breakdown signature: the mean criterion runs to the top of the
      // grid (the published minimum is the endpoint itself, with an
      // unbounded condition number; sampling noise can park the
      // realized minimum a few grid steps below it)
      const TuningResult r_mean = select_beta(curve, Criterion::CvMean, centered);
      if (r_mean.beta_star >= 4.5 - 1e-9 || r_mean.condition_number > 50.0) ++mean_hits;
      const TuningResult r_med = select_beta(curve, Criterion::CvMedMed, centered);
      if (r_med.beta_star >= 1.0 - 1e-9 && r_med.beta_star <= 3.0 + 1e-9 &&
          r_med.condition_number < 10.0)
        ++med_hits;
    } catch (const std::exception&) {
    }
  }
  std::ostringstream os;
  os << "cvmean at beta=q in " << mean_hits << "/5, cvmedmed interior in " << med_hits
     << "/5";
  report(6, "contaminated tuning curves behave as published", mean_hits >= 4 && med_hits >= 4,
         os.str());
}

// ---------------------------------------------------------------- 7
void criterion_breakdown() {
  std::mt19937_64 rng(131);
  const int n = 24, q = 2;
  const DataMatrix x(random_normal(n, q, rng));
  bool ok = true;
  std::string detail;

  const ScatterFn sscm_fixed = [](const DataMatrix& d) {
    return sscm(d, CenterSpec::known_center(Vector::Zero(d.q()))).matrix;
  };
  if (!breakdown_probe(sscm_fixed, "sscm", x, n - 1).resistant) {
    ok = false;
    detail = "fixed-center SSCM broke";
  }

  const ScatterFn kl_fn = [](const DataMatrix& d) {
    // (1-gamma) kappa = 0.9 < 1
    return solve_penalized(d, WeightFunction::t_shift(1.8), PenaltySpec::kl(0.5)).sigma;
  };
  if (!breakdown_probe(kl_fn, "kl", x, n - 1).resistant) {
    ok = false;
    detail = "KL with (1-gamma)kappa<1 broke";
  }

  const ScatterFn tyler_beta_fn = [](const DataMatrix& d) {
    return solve_tyler_beta(d, 0.8, 0.5).sigma;
  };
  if (!breakdown_probe(tyler_beta_fn, "tyler-beta", x, n - 1).resistant) {
    ok = false;
    detail = "Tyler beta<1 broke";
  }

  const ScatterFn sscm_spatial = [](const DataMatrix& d) {
    return sscm(center_data(d, CenterSpec::spatial_median()),
                CenterSpec::known_center(Vector::Zero(d.q())))
        .matrix;
  };
  if (!breakdown_probe(sscm_spatial, "sscm-spatial", x, n / 2 - 1).resistant) {
    ok = false;
    detail = "spatial-median SSCM broke below n/2";
  }
  report(7, "breakdown probes resistant as guaranteed", ok, detail);
}

// ---------------------------------------------------------------- 8
void criterion_sigma_r() {
  bool ok = true;
  std::string detail;

  Matrix four(4, 2);
  four << 1, 0, -1, 0, 0, 1, 0, -1;
  const DataMatrix d4(four);
  HbdOptions opt;
  const HbdResult r4 = sigma_R(d4, opt);
  {
    // dense grid over trace-2 shapes (log-ratio, angle); keep all ties
    double best = 1e300;
    std::vector<Matrix> mins;
    // theta step divides pi/2 exactly so axis-aligned tie minimizers
    // and their 90-degree twins are both on the grid
    for (double lr = 0.0; lr <= std::log10(opt.cn_cap) + 1e-12; lr += 0.02)
      for (int t = 0; t < 314; ++t) {
        const double th = t * (M_PI / 314.0);
        const double ratio = std::pow(10.0, lr);
        Vector ev(2);
        ev << 2.0 * ratio / (1.0 + ratio), 2.0 / (1.0 + ratio);
        Matrix p(2, 2);
        p << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        const Matrix s = p * ev.asDiagonal() * p.transpose();
        const double v = D_value(d4, s);
        if (v < best - 1e-6) {
          best = v;
          mins.clear();
        }
        if (v <= best + 1e-6) mins.push_back(s);
      }
    double dist = 1e300;
    for (const Matrix& m : mins) dist = std::min(dist, riemannian_distance(r4.shape, m));
    if (dist > 0.05) {
      ok = false;
      detail = "grid oracle distance " + std::to_string(dist);
    }
  }

  std::mt19937_64 rng(141);
  const DataMatrix x(random_normal(40, 2, rng));
  {
    Matrix a(2, 2);
    a << 2, 1, 0, 1.5;
    const Matrix sc = sigma_sc_R(x);
    const Matrix sc_a = sigma_sc_R(DataMatrix(x.rows() * a.transpose()));
    const double dist = riemannian_distance(sc_a, a * sc * a.transpose());
    if (dist > 0.1) {
      ok = false;
      detail = "equivariance distance " + std::to_string(dist);
    }
  }
  {
    const double clean_cn = condition_number(sigma_R(x).shape);
    const int m = (40 - 2 * 2 + 2) / 2 - 1;
    Matrix z = x.rows();
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < m; ++i) {
      Vector dir(2);
      dir << g(rng), g(rng);
      z.row(i) = (1e6 * dir.normalized()).transpose();
    }
    const double dirty_cn = condition_number(sigma_R(DataMatrix(z)).shape);
    if (dirty_cn > 1.5 * clean_cn) {
      ok = false;
      detail = "contaminated cn " + std::to_string(dirty_cn);
    }
  }
  report(8, "high-breakdown shape suite (q=2)", ok, detail);
}

// ---------------------------------------------------------------- 9
void criterion_eigenstructure() {
  struct Config {
    Vector ev;
    double kappa;
  };
  std::vector<Config> configs;
  Vector m1(5), m2(5), tied(4), top(3), small2(2), m1b(5);
  m1 << 10, 1, 1, 1, 1;
  for (int i = 0; i < 5; ++i) m2(i) = 10.0 - 2.25 * i;
  tied << 8, 4, 4, 1;
  top << 5, 5, 1;
  small2 << 4, 1;
  m1b << 10, 1, 1, 1, 1;
  configs.push_back({m1, 3.0});
  configs.push_back({m1b, 1.0});
  configs.push_back({m2, 3.0});
  configs.push_back({tied, 2.0});
  configs.push_back({top, 4.0});
  configs.push_back({small2, 1.5});

  const std::vector<double> gammas{0.05, 0.2, 0.5, 0.8, 0.95};
  const int n_seeds = 5, n_draws = 20000;
  bool ok = true;
  std::string detail;

  for (size_t ci = 0; ci < configs.size() && ok; ++ci) {
    const auto& cfg = configs[ci];
    const int q = static_cast<int>(cfg.ev.size());
    const auto model = EllipticalModel::normal(cfg.ev);
    const auto w = WeightFunction::t_shift(cfg.kappa);

    // per gamma: mean and SE over seeds of lambda and the (1,q) ratios
    std::vector<Vector> mean_lambda(gammas.size());
    std::vector<Vector> se_lambda(gammas.size());
    std::vector<double> mean_ratio(gammas.size()), se_ratio(gammas.size());
    for (size_t gi = 0; gi < gammas.size(); ++gi) {
      Matrix lam(n_seeds, q);
      Vector ratio(n_seeds);
      for (int s = 0; s < n_seeds; ++s) {
        const auto sol = solve_lambda_system(model, w, gammas[gi], n_draws,
                                             mix_seed(500 + ci, 10 * gi + s),
                                             /*symmetrize=*/true);
        lam.row(s) = sol.lambda.transpose();
        ratio(s) = sol.lambda(0) / sol.lambda(q - 1);
      }
      mean_lambda[gi] = lam.colwise().mean();
      Vector sd(q);
      for (int j = 0; j < q; ++j)
        sd(j) = std::sqrt((lam.col(j).array() - mean_lambda[gi](j)).square().sum() /
                          (n_seeds - 1));
      se_lambda[gi] = sd / std::sqrt(double(n_seeds));
      mean_ratio[gi] = ratio.mean();
      se_ratio[gi] = std::sqrt((ratio.array() - mean_ratio[gi]).square().sum() /
                               (n_seeds - 1)) /
                     std::sqrt(double(n_seeds));
    }

    for (size_t gi = 0; gi < gammas.size() && ok; ++gi) {
      const Vector& lam = mean_lambda[gi];
      const Vector& se = se_lambda[gi];
      const double gamma = gammas[gi];
      // Monte Carlo slack: 3 standard errors plus a 1e-3 relative floor
      // (the cyclic-shift symmetrization leaves a small residual
      // asymmetry between tied coordinates; the effect sizes being
      // checked are two orders of magnitude larger).
      for (int i = 0; i + 1 < q; ++i) {
        const double tol = 3.0 * (se(i) + se(i + 1)) + 1e-3 * lam(i + 1);
        if (cfg.ev(i) > cfg.ev(i + 1) + 1e-12) {
          if (!(lam(i) > lam(i + 1) - tol)) {
            ok = false;
            detail = "ordering violated, config " + std::to_string(ci);
          }
        } else if (std::abs(lam(i) - lam(i + 1)) > tol) {
          ok = false;
          detail = "multiplicity violated, config " + std::to_string(ci);
        }
      }
      // sandwich 1 <= l_i/l_j <= lv_i/lv_j <= lo_i/lo_j
      if (gamma < 1.0) {
        for (int i = 0; i < q && ok; ++i)
          for (int j = i + 1; j < q; ++j) {
            const double r = lam(i) / lam(j);
            const double rv = (lam(i) - gamma) / (lam(j) - gamma);
            const double ro = cfg.ev(i) / cfg.ev(j);
            const double abs_tol = 3.0 * (se(i) + se(j)) + 1e-3 * lam(j);
            const double tol_r = abs_tol / lam(j) * (1.0 + r);
            const double tol_rv =
                abs_tol * (1.0 + rv) / std::max(lam(j) - gamma, 1e-3);
            if (r < 1.0 - tol_r || rv < r - tol_rv || ro < rv - tol_rv) {
              ok = false;
              detail = "sandwich violated, config " + std::to_string(ci);
            }
          }
      }
    }
    // gamma-monotonicity of the top/bottom ratio
    for (size_t gi = 0; gi + 1 < gammas.size() && ok; ++gi) {
      const double tol =
          3.0 * (se_ratio[gi] + se_ratio[gi + 1]) + 1e-3 * mean_ratio[gi];
      if (mean_ratio[gi + 1] > mean_ratio[gi] + tol) {
        ok = false;
        detail = "gamma monotonicity violated, config " + std::to_string(ci);
      }
    }
  }
  report(9, "population eigen-structure suite (6 configurations)", ok, detail);
}

}  // namespace

int main() {
  if (!std::getenv("RRCOV_PARALLEL")) setenv("RRCOV_PARALLEL", "8", 1);
  criterion_table();
  criterion_analytic();
  criterion_bounds();
  criterion_identities();
  criterion_cv_invariances();
  criterion_figures();
  criterion_breakdown();
  criterion_sigma_r();
  criterion_eigenstructure();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: ")
            << (g_failures == 0 ? "" : std::to_string(g_failures)) << std::endl;
  return g_failures == 0 ? 0 : 1;
}
