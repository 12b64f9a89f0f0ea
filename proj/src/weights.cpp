#include "rrcov/weights.hpp"

#include <cmath>

namespace rrcov {

WeightFunction WeightFunction::tyler(double kappa) {
  if (kappa <= 0) throw std::invalid_argument("WeightFunction: kappa must be positive");
  WeightFunction w;
  w.kind_ = Kind::Tyler;
  w.kappa_ = kappa;
  return w;
}

WeightFunction WeightFunction::t_shift(double kappa, double shift) {
  if (kappa <= 0 || shift <= 0)
    throw std::invalid_argument("WeightFunction: kappa and shift must be positive");
  WeightFunction w;
  w.kind_ = Kind::TShift;
  w.kappa_ = kappa;
  w.shift_ = shift;
  return w;
}

WeightFunction WeightFunction::custom(std::function<double(double)> u,
                                      bool non_increasing_u) {
  WeightFunction w;
  w.kind_ = Kind::Custom;
  w.fn_ = std::move(u);
  const int kGrid = 1000;
  double prev_psi = 0.0;
  double prev_u = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double s = std::pow(10.0, -8.0 + 20.0 * i / (kGrid - 1));
    const double us = w.fn_(s);
    if (!(us > 0)) throw std::invalid_argument("WeightFunction: u must be positive");
    const double ps = s * us;
    if (i > 0) {
      if (ps < prev_psi * (1.0 - 1e-9))
        throw std::invalid_argument("WeightFunction: psi not non-decreasing");
      if (non_increasing_u && us > prev_u * (1.0 + 1e-9))
        throw std::invalid_argument("WeightFunction: u not non-increasing");
    }
    prev_psi = ps;
    prev_u = us;
  }
  w.kappa_ = 1e12 * w.fn_(1e12);  // kappa = psi(inf), sampled at s = 10^12
  return w;
}

double WeightFunction::u(double s) const {
  switch (kind_) {
    case Kind::Tyler:
      if (s <= 0) throw std::domain_error("Tyler weight undefined at s = 0");
      return kappa_ / s;
    case Kind::TShift:
      return kappa_ / (s + shift_);
    case Kind::Custom:
      return fn_(s);
  }
  throw std::logic_error("unreachable");
}

Eigen::ArrayXd WeightFunction::u(const Eigen::ArrayXd& s) const {
  switch (kind_) {
    case Kind::Tyler:
      if ((s <= 0).any()) throw std::domain_error("Tyler weight undefined at s = 0");
      return kappa_ / s;
    case Kind::TShift:
      return kappa_ / (s + shift_);
    case Kind::Custom: {
      Eigen::ArrayXd out(s.size());
      for (Eigen::Index i = 0; i < s.size(); ++i) out(i) = fn_(s(i));
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace rrcov
