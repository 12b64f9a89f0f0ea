#ifndef RRCOV_HARNESS_HPP
#define RRCOV_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rrcov/types.hpp"

namespace rrcov {

struct ContaminationScheme {
  enum class Kind { SymmetricCluster, RadialBlowup, Custom };
  enum class Mode { Replace, Add };

  Kind kind = Kind::SymmetricCluster;
  Mode mode = Mode::Replace;
  int m = 1;
  std::uint64_t seed = 1;

  // SymmetricCluster: +/- pairs of N(center, spread^2 I) draws.
  Vector center;
  double spread = 0.1;

  // RadialBlowup: all m points at distance * direction/||direction||.
  Vector direction;
  double distance = 0.0;

  // Custom: the rows to inject verbatim.
  Matrix points;

  static ContaminationScheme symmetric_cluster(Vector center, double spread, int m,
                                               Mode mode, std::uint64_t seed);
  static ContaminationScheme radial_blowup(Vector direction, double distance, int m,
                                           Mode mode, std::uint64_t seed);
  static ContaminationScheme custom(Matrix points, Mode mode, std::uint64_t seed);
};

// Deterministic in the scheme seed. Replace swaps m randomly chosen
// rows for the contaminants; Add appends them. Throws when m > n under
// Replace or m < 1.
DataMatrix contaminate(const DataMatrix& x, const ContaminationScheme& scheme);

using ScatterFn = std::function<Matrix(const DataMatrix&)>;

struct BreakdownOptions {
  std::vector<double> rungs{1e2, 1e4, 1e6};
  int directions = 20;     // random directions probed per rung
  int spread_refits = 5;   // half-sample refits defining the clean spread
  double spread_floor = 0.1;
  double verdict_factor = 10.0;  // diverging iff top-rung bias > factor * spread
  std::uint64_t seed = 1;
};

struct BreakdownReport {
  std::string estimator_id;
  int m = 0;
  std::vector<double> rungs;
  std::vector<double> max_bias;  // per rung, empirical max over directions
  double clean_spread = 0.0;
  bool resistant = false;
  std::string note;  // failure note when an evaluation threw
};

// Empirical breakdown probe: replaces m rows of x with a cluster at
// rung * direction for each rung of the scale ladder and each of 20
// seeded directions, and measures the Riemannian distance between the
// trace-normalized contaminated and clean fits. The estimator is
// declared diverging when the bias keeps growing along the ladder and
// the top-rung bias clears verdict_factor times the spread of clean
// half-sample refits (floored); a large but scale-stable bias still
// counts as resistant, and pure sampling variability never reads as
// breakdown. The verdict is a finite-ladder probe, not a supremum
// claim.
BreakdownReport breakdown_probe(const ScatterFn& estimator, const std::string& estimator_id,
                                const DataMatrix& x, int m,
                                const BreakdownOptions& options = {});

// CSV: comma separated, one observation per row; one optional header
// line (detected by a non-numeric first field) is skipped. Any other
// unparsable row aborts with its line number.
Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

}  // namespace rrcov

#endif
