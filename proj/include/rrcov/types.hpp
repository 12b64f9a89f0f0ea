#ifndef RRCOV_TYPES_HPP
#define RRCOV_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace rrcov {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// n observations in R^q, one per row. Immutable after construction.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix rows) : rows_(std::move(rows)) {
    if (rows_.rows() < 1 || rows_.cols() < 1)
      throw std::invalid_argument("DataMatrix: need n >= 1 and q >= 1");
    if (!rows_.allFinite())
      throw std::invalid_argument("DataMatrix: non-finite entry");
  }

  static DataMatrix from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) throw std::invalid_argument("DataMatrix: empty");
    Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols())
        throw std::invalid_argument("DataMatrix: ragged rows");
      m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return DataMatrix(std::move(m));
  }

  int n() const { return static_cast<int>(rows_.rows()); }
  int q() const { return static_cast<int>(rows_.cols()); }

  int n_nonzero() const {
    int c = 0;
    for (int i = 0; i < n(); ++i)
      if (rows_.row(i).norm() > 0.0) ++c;
    return c;
  }

  Vector row(int i) const { return rows_.row(i).transpose(); }
  const Matrix& rows() const { return rows_; }

  // Rows with positive Euclidean norm, in original order.
  DataMatrix nonzero_rows() const {
    std::vector<int> keep;
    for (int i = 0; i < n(); ++i)
      if (rows_.row(i).norm() > 0.0) keep.push_back(i);
    if (keep.empty())
      throw std::runtime_error("DataMatrix: all rows are zero");
    Matrix m(static_cast<Eigen::Index>(keep.size()), q());
    for (size_t i = 0; i < keep.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows_.row(keep[i]);
    return DataMatrix(std::move(m));
  }

 private:
  Matrix rows_;
};

// A symmetric positive definite matrix. The input is symmetrized as
// (M + M^T)/2; asymmetry beyond 1e-12 relative and non-positive
// eigenvalues are rejected.
class SymmetricPD {
 public:
  explicit SymmetricPD(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw std::invalid_argument("SymmetricPD: not square");
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
      throw std::invalid_argument("SymmetricPD: input not symmetric");
    m_ = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("SymmetricPD: eigensolver failed");
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("SymmetricPD: not positive definite");
  }

  const Matrix& mat() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  static SymmetricPD identity(int q) { return SymmetricPD(Matrix::Identity(q, q)); }

 private:
  Matrix m_;
};

}  // namespace rrcov

#endif
