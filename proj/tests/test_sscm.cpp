#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "rrcov/sscm.hpp"
#include "test_helpers.hpp"

using namespace rrcov;
using namespace rrcov::testing;

namespace {
const CenterSpec kZero2 = CenterSpec::known_center(Vector::Zero(2));
}

TEST_CASE("spatial_sign") {
  Vector x(2);
  x << 3, 4;
  const Vector s = spatial_sign(x);
  CHECK(s(0) == doctest::Approx(0.6));
  CHECK(s(1) == doctest::Approx(0.8));
  CHECK(spatial_sign(Vector::Zero(3)).norm() == 0.0);
  std::mt19937_64 rng(2);
  Vector u = random_vector(4, rng);
  u /= u.norm();
  CHECK((spatial_sign(u) - u).norm() < 1e-14);
}

TEST_CASE("sscm closed forms") {
  Matrix x(4, 2);
  x << 1, 0, -1, 0, 0, 1, 0, -1;
  const SignMatrix s = sscm(DataMatrix(x), kZero2);
  CHECK(rel_frob(s.matrix, 0.5 * Matrix::Identity(2, 2)) < 1e-14);
  CHECK(s.trace_value == doctest::Approx(1.0));

  Matrix r1(2, 2);
  r1 << 1, 0, -1, 0;
  const SignMatrix s1 = sscm(DataMatrix(r1), kZero2);
  CHECK(s1.matrix(0, 0) == doctest::Approx(1.0));
  CHECK(s1.matrix(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("sscm direct-sum oracle and zero-row trace") {
  std::mt19937_64 rng(13);
  const DataMatrix x = gaussian_data(50, 3, rng);
  const SignMatrix s = sscm(x, CenterSpec::known_center(Vector::Zero(3)));
  Matrix oracle = Matrix::Zero(3, 3);
  for (int i = 0; i < 50; ++i) {
    const Vector si = spatial_sign(x.row(i));
    oracle += si * si.transpose();
  }
  oracle /= 50.0;
  CHECK((s.matrix - oracle).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.trace_value == doctest::Approx(s.matrix.trace()));

  // a zero row reduces the trace to n_nonzero/n
  Matrix z(3, 2);
  z << 1, 0, 0, 1, 0, 0;
  const SignMatrix sz = sscm(DataMatrix(z), kZero2);
  CHECK(sz.trace_value == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("sscm equivariance and invariance") {
  std::mt19937_64 rng(19);
  const DataMatrix x = gaussian_data(25, 3, rng);
  const CenterSpec zero3 = CenterSpec::known_center(Vector::Zero(3));
  const Matrix s = sscm(x, zero3).matrix;

  const Matrix qm = random_orthogonal(3, rng);
  const Matrix sq = sscm(DataMatrix(x.rows() * qm.transpose()), zero3).matrix;
  CHECK((sq - qm * s * qm.transpose()).cwiseAbs().maxCoeff() < 1e-10);

  const Matrix sc = sscm(DataMatrix(2.7 * x.rows()), zero3).matrix;
  CHECK((sc - s).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("sscm fixed-center resistance bound") {
  std::mt19937_64 rng(29);
  const DataMatrix x = gaussian_data(20, 2, rng);
  const Matrix clean = sscm(x, kZero2).matrix;
  const int m = 7;
  Matrix z = x.rows();
  for (int i = 0; i < m; ++i) z.row(i) = (1e6 * random_vector(2, rng)).transpose();
  const Matrix dirty = sscm(DataMatrix(z), kZero2).matrix;
  CHECK((dirty - clean).cwiseAbs().maxCoeff() <= static_cast<double>(m) / 20.0 + 1e-12);
}

TEST_CASE("sscm eigenvector consistency under diag(4,1) normal") {
  std::mt19937_64 rng(31);
  Matrix root = Matrix::Zero(2, 2);
  root(0, 0) = 2.0;
  root(1, 1) = 1.0;
  const DataMatrix x = gaussian_data(10000, 2, rng, root);
  const Matrix s = sscm(x, kZero2).matrix;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Vector lead = es.eigenvectors().col(1);  // largest eigenvalue
  CHECK(std::acos(std::min(1.0, std::abs(lead(0)))) < 0.1);
}

TEST_CASE("generalized_sscm") {
  std::mt19937_64 rng(37);
  const DataMatrix x = gaussian_data(20, 3, rng);
  const CenterSpec zero3 = CenterSpec::known_center(Vector::Zero(3));

  SUBCASE("u(s)=1/s recovers the SSCM") {
    const Matrix g = generalized_sscm(x, WeightFunction::tyler(1.0), zero3);
    CHECK((g - sscm(x, zero3).matrix).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("u = 1 gives the second moment") {
    const auto one = WeightFunction::custom([](double) { return 1.0; }, true);
    const Matrix g = generalized_sscm(x, one, zero3);
    const Matrix oracle = x.rows().transpose() * x.rows() / 20.0;
    CHECK(rel_frob(g, oracle) < 1e-12);
  }
  SUBCASE("u(s)=1/(1+s) direct-sum oracle") {
    const auto w = WeightFunction::custom([](double s) { return 1.0 / (1.0 + s); }, true);
    const Matrix g = generalized_sscm(x, w, zero3);
    Matrix oracle = Matrix::Zero(3, 3);
    for (int i = 0; i < 20; ++i) {
      const Vector xi = x.row(i);
      oracle += xi * xi.transpose() / (1.0 + xi.squaredNorm());
    }
    oracle /= 20.0;
    CHECK(rel_frob(g, oracle) < 1e-12);
  }
  SUBCASE("rank-deficient data rejected") {
    Matrix flat(5, 2);
    flat << 1, 0, 2, 0, -1, 0, 3, 0, 0.5, 0;
    CHECK_THROWS(generalized_sscm(DataMatrix(flat), WeightFunction::tyler(1.0), kZero2));
  }
}
