#include "rrcov/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "rrcov/core.hpp"

namespace rrcov {

ContaminationScheme ContaminationScheme::symmetric_cluster(Vector center, double spread,
                                                           int m, Mode mode,
                                                           std::uint64_t seed) {
  ContaminationScheme s;
  s.kind = Kind::SymmetricCluster;
  s.center = std::move(center);
  s.spread = spread;
  s.m = m;
  s.mode = mode;
  s.seed = seed;
  return s;
}

ContaminationScheme ContaminationScheme::radial_blowup(Vector direction, double distance,
                                                       int m, Mode mode,
                                                       std::uint64_t seed) {
  ContaminationScheme s;
  s.kind = Kind::RadialBlowup;
  s.direction = std::move(direction);
  s.distance = distance;
  s.m = m;
  s.mode = mode;
  s.seed = seed;
  return s;
}

ContaminationScheme ContaminationScheme::custom(Matrix points, Mode mode,
                                                std::uint64_t seed) {
  ContaminationScheme s;
  s.kind = Kind::Custom;
  s.points = std::move(points);
  s.m = static_cast<int>(s.points.rows());
  s.mode = mode;
  s.seed = seed;
  return s;
}

namespace {

Matrix contaminant_rows(const ContaminationScheme& scheme, int q, std::mt19937_64& rng) {
  const int m = scheme.m;
  Matrix y(m, q);
  switch (scheme.kind) {
    case ContaminationScheme::Kind::SymmetricCluster: {
      if (scheme.center.size() != q)
        throw std::invalid_argument("contaminate: center dimension mismatch");
      std::normal_distribution<double> gauss(0.0, 1.0);
      // +/- pairs: draw ceil(m/2) cluster points, emit y and -y.
      const int pairs = (m + 1) / 2;
      int r = 0;
      for (int p = 0; p < pairs; ++p) {
        Vector yp(q);
        for (int j = 0; j < q; ++j) yp(j) = scheme.center(j) + scheme.spread * gauss(rng);
        y.row(r++) = yp.transpose();
        if (r < m) y.row(r++) = -yp.transpose();
      }
      break;
    }
    case ContaminationScheme::Kind::RadialBlowup: {
      if (scheme.direction.size() != q)
        throw std::invalid_argument("contaminate: direction dimension mismatch");
      const double nrm = scheme.direction.norm();
      if (nrm == 0.0) throw std::invalid_argument("contaminate: zero direction");
      const Vector point = scheme.distance * scheme.direction / nrm;
      for (int i = 0; i < m; ++i) y.row(i) = point.transpose();
      break;
    }
    case ContaminationScheme::Kind::Custom: {
      if (scheme.points.cols() != q)
        throw std::invalid_argument("contaminate: custom points dimension mismatch");
      y = scheme.points;
      break;
    }
  }
  return y;
}

}  // namespace

DataMatrix contaminate(const DataMatrix& x, const ContaminationScheme& scheme) {
  if (scheme.m < 1) throw std::invalid_argument("contaminate: m >= 1 required");
  if (scheme.mode == ContaminationScheme::Mode::Replace && scheme.m > x.n())
    throw std::invalid_argument("contaminate: m > n under Replace");

  std::mt19937_64 rng(scheme.seed);
  const Matrix y = contaminant_rows(scheme, x.q(), rng);

  if (scheme.mode == ContaminationScheme::Mode::Add) {
    Matrix z(x.n() + scheme.m, x.q());
    z.topRows(x.n()) = x.rows();
    z.bottomRows(scheme.m) = y;
    return DataMatrix(std::move(z));
  }
  std::vector<int> idx(x.n());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  Matrix z = x.rows();
  for (int i = 0; i < scheme.m; ++i) z.row(idx[i]) = y.row(i);
  return DataMatrix(std::move(z));
}

BreakdownReport breakdown_probe(const ScatterFn& estimator, const std::string& estimator_id,
                                const DataMatrix& x, int m,
                                const BreakdownOptions& options) {
  if (m < 1 || m > x.n())
    throw std::invalid_argument("breakdown_probe: requires 1 <= m <= n");
  const int q = x.q();
  BreakdownReport report;
  report.estimator_id = estimator_id;
  report.m = m;
  report.rungs = options.rungs;

  Matrix clean_shape;
  try {
    clean_shape = shape_of(estimator(x));
  } catch (const std::exception& e) {
    report.resistant = false;
    report.note = std::string("clean fit failed: ") + e.what();
    return report;
  }

  // Clean-data spread: max pairwise shape distance over half-sample
  // refits, floored so a near-deterministic estimator keeps a usable
  // yardstick.
  std::vector<Matrix> refits;
  for (int r = 0; r < options.spread_refits; ++r) {
    std::mt19937_64 rng(mix_seed(options.seed, 1000 + static_cast<std::uint64_t>(r)));
    std::vector<int> idx(x.n());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    const int half = std::max(q + 1, x.n() / 2);
    if (half > x.n()) break;
    Matrix sub(half, q);
    for (int i = 0; i < half; ++i) sub.row(i) = x.rows().row(idx[i]);
    try {
      refits.push_back(shape_of(estimator(DataMatrix(std::move(sub)))));
    } catch (const std::exception&) {
    }
  }
  double spread = 0.0;
  for (size_t a = 0; a < refits.size(); ++a)
    for (size_t b = a + 1; b < refits.size(); ++b)
      spread = std::max(spread, riemannian_distance(refits[a], refits[b]));
  report.clean_spread = std::max(spread, options.spread_floor);

  std::mt19937_64 dir_rng(mix_seed(options.seed, 7));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> directions;
  for (int d = 0; d < options.directions; ++d) {
    Vector u(q);
    do {
      for (int j = 0; j < q; ++j) u(j) = gauss(dir_rng);
    } while (u.norm() == 0.0);
    directions.push_back(u / u.norm());
  }

  bool failed = false;
  for (size_t r = 0; r < options.rungs.size(); ++r) {
    double worst = 0.0;
    for (size_t d = 0; d < directions.size(); ++d) {
      // The replacement seed depends only on the direction, so climbing
      // the ladder moves the same contaminated rows outward and bias
      // growth is attributable to the distance alone.
      const auto scheme = ContaminationScheme::radial_blowup(
          directions[d], options.rungs[r], m, ContaminationScheme::Mode::Replace,
          mix_seed(options.seed, 100 + d));
      try {
        const Matrix fit = shape_of(estimator(contaminate(x, scheme)));
        worst = std::max(worst, riemannian_distance(clean_shape, fit));
      } catch (const std::exception& e) {
        failed = true;
        if (report.note.empty())
          report.note = std::string("fit failed at rung ") +
                        std::to_string(options.rungs[r]) + ": " + e.what();
        worst = std::numeric_limits<double>::infinity();
      }
    }
    report.max_bias.push_back(worst);
  }
  // Divergence means the bias keeps growing as the contaminants are
  // pushed out along the scale ladder; a large but scale-stable bias
  // (for example a bounded-influence estimator under heavy replacement)
  // is still resistant.
  const double top = report.max_bias.back();
  const double bottom = report.max_bias.front();
  const bool grows = top > options.verdict_factor * report.clean_spread &&
                     top > bottom + report.clean_spread;
  report.resistant = !failed && std::isfinite(top) && !grows;
  return report;
}

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv_matrix: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  int cols = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    bool parse_ok = true;
    while (std::getline(ss, field, ',')) {
      try {
        size_t used = 0;
        const double v = std::stod(field, &used);
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
          ++used;
        if (used != field.size()) throw std::invalid_argument("trailing garbage");
        row.push_back(v);
      } catch (const std::exception&) {
        parse_ok = false;
        break;
      }
    }
    if (!parse_ok) {
      if (lineno == 1) continue;  // a single header line is allowed
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": cannot parse field '" + field + "'");
    }
    if (cols == -1) cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != cols)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(cols) + " fields, got " +
                               std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_csv_matrix: no data rows in " + path);
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][j];
  return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv_matrix: cannot open " + path);
  out.precision(17);
  if (!header.empty()) {
    for (size_t j = 0; j < header.size(); ++j)
      out << header[j] << (j + 1 < header.size() ? "," : "\n");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << m(i, j) << (j + 1 < m.cols() ? "," : "\n");
  if (!out) throw std::runtime_error("write_csv_matrix: write failed for " + path);
}

}  // namespace rrcov
