#pragma once

#include <Eigen/Core>

#include "warped/grid.hpp"

namespace warped {

/// Cubic Hermite value on [x0, x1] from endpoint values and slopes.
template <typename Scalar>
Scalar hermite_cubic(Scalar x0, Scalar y0, Scalar d0, Scalar x1, Scalar y1, Scalar d1,
                     Scalar x) {
  const Scalar h = x1 - x0;
  const Scalar t = (x - x0) / h;
  const Scalar t2 = t * t;
  const Scalar t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

/// Quintic Hermite value on [x0, x1] from endpoint values, slopes and second
/// derivatives.
template <typename Scalar>
Scalar hermite_quintic(Scalar x0, Scalar y0, Scalar d0, Scalar s0, Scalar x1, Scalar y1,
                       Scalar d1, Scalar s1, Scalar x) {
  const Scalar h = x1 - x0;
  const Scalar t = (x - x0) / h;
  const Scalar t2 = t * t;
  const Scalar t3 = t2 * t;
  const Scalar t4 = t3 * t;
  const Scalar t5 = t4 * t;
  const Scalar jump = 10 * t3 - 15 * t4 + 6 * t5;
  return y0 + (y1 - y0) * jump + h * (d0 * (t - 6 * t3 + 8 * t4 - 3 * t5) +
                                      d1 * (-4 * t3 + 7 * t4 - 3 * t5)) +
         h * h * Scalar(0.5) * (s0 * (t2 - 3 * t3 + 3 * t4 - t5) + s1 * (t3 - 2 * t4 + t5));
}

/// Derivative of hermite_cubic with respect to x.
template <typename Scalar>
Scalar hermite_cubic_slope(Scalar x0, Scalar y0, Scalar d0, Scalar x1, Scalar y1, Scalar d1,
                           Scalar x) {
  const Scalar h = x1 - x0;
  const Scalar t = (x - x0) / h;
  const Scalar t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (-6 * t2 + 6 * t) * y1) / h + (3 * t2 - 4 * t + 1) * d0 +
         (3 * t2 - 2 * t) * d1;
}

/// Fritsch–Carlson monotone piecewise-cubic interpolant over a radial grid.
/// Monotone data stays monotone; local extrema get zero slope.
class MonotoneCubic {
 public:
  MonotoneCubic(RadialGrid grid, Eigen::VectorXd values);
  /// Known slopes, limited where they would break monotonicity.
  MonotoneCubic(RadialGrid grid, Eigen::VectorXd values, Eigen::VectorXd slopes);

  double operator()(double r) const;
  const RadialGrid& grid() const noexcept { return grid_; }

 private:
  RadialGrid grid_;
  Eigen::VectorXd values_;
  Eigen::VectorXd slopes_;
};

/// Natural cubic spline, used for tabulated curvature input.
class NaturalCubicSpline {
 public:
  NaturalCubicSpline(Eigen::VectorXd x, Eigen::VectorXd y);

  double operator()(double x) const;
  double front() const { return x_[0]; }
  double back() const { return x_[x_.size() - 1]; }

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd second_;
};

}  // namespace warped
