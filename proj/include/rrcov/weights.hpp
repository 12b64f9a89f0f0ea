#ifndef RRCOV_WEIGHTS_HPP
#define RRCOV_WEIGHTS_HPP

#include <functional>

#include "rrcov/types.hpp"

namespace rrcov {

// The weight triple (rho, u, psi) driving the M-estimators: u(s) is the
// weight applied to squared Mahalanobis-type distances, psi(s) = s u(s)
// must be non-decreasing, and kappa = sup psi. The Tyler kind is
// u(s) = kappa/s (psi constant); TShift is u(s) = kappa/(s + shift).
class WeightFunction {
 public:
  enum class Kind { Tyler, TShift, Custom };

  WeightFunction() : kind_(Kind::Tyler), kappa_(1.0) {}

  static WeightFunction tyler(double kappa);
  static WeightFunction t_shift(double kappa, double shift = 2.0);
  // Monotonicity of psi (and of u, when claimed non-increasing) is
  // validated on 10^3 log-spaced points in [1e-8, 1e12].
  static WeightFunction custom(std::function<double(double)> u,
                               bool non_increasing_u = true);

  double u(double s) const;
  double psi(double s) const { return s * u(s); }
  Eigen::ArrayXd u(const Eigen::ArrayXd& s) const;

  double kappa() const { return kappa_; }
  double shift() const { return shift_; }
  Kind kind() const { return kind_; }

 private:
  Kind kind_ = Kind::Custom;
  double kappa_ = 0.0;
  double shift_ = 0.0;
  std::function<double(double)> fn_;
};

}  // namespace rrcov

#endif
