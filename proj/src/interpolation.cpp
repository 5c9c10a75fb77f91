#include "warped/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace warped {

MonotoneCubic::MonotoneCubic(RadialGrid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  const Eigen::Index n = grid_.size();
  if (values_.size() != n) throw std::invalid_argument("MonotoneCubic: size mismatch");
  const Eigen::VectorXd& x = grid_.nodes();
  Eigen::VectorXd secant(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    secant[i] = (values_[i + 1] - values_[i]) / (x[i + 1] - x[i]);
  }
  slopes_.resize(n);
  slopes_[0] = secant[0];
  slopes_[n - 1] = secant[n - 2];
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] <= 0.0) {
      slopes_[i] = 0.0;
    } else {
      // Weighted harmonic mean (Fritsch–Butland) on nonuniform panels.
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      const double w0 = 2.0 * h1 + h0;
      const double w1 = h1 + 2.0 * h0;
      slopes_[i] = (w0 + w1) / (w0 / secant[i - 1] + w1 / secant[i]);
    }
  }
}

MonotoneCubic::MonotoneCubic(RadialGrid grid, Eigen::VectorXd values, Eigen::VectorXd slopes)
    : grid_(std::move(grid)), values_(std::move(values)), slopes_(std::move(slopes)) {
  const Eigen::Index n = grid_.size();
  if (values_.size() != n || slopes_.size() != n) {
    throw std::invalid_argument("MonotoneCubic: size mismatch");
  }
  const Eigen::VectorXd& x = grid_.nodes();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double secant = (values_[i + 1] - values_[i]) / (x[i + 1] - x[i]);
    if (secant == 0.0) {
      slopes_[i] = slopes_[i + 1] = 0.0;
      continue;
    }
    // Fritsch–Carlson: slopes against the secant's sign vanish, and the pair is
    // pulled into the circle of radius 3 where the cubic stays monotone.
    double a = slopes_[i] / secant, b = slopes_[i + 1] / secant;
    if (a < 0.0) slopes_[i] = a = 0.0;
    if (b < 0.0) slopes_[i + 1] = b = 0.0;
    const double rho = a * a + b * b;
    if (rho > 9.0) {
      const double t = 3.0 / std::sqrt(rho);
      slopes_[i] = t * a * secant;
      slopes_[i + 1] = t * b * secant;
    }
  }
}

double MonotoneCubic::operator()(double r) const {
  const Eigen::Index i = grid_.panel_of(r);
  const Eigen::VectorXd& x = grid_.nodes();
  return hermite_cubic(x[i], values_[i], slopes_[i], x[i + 1], values_[i + 1], slopes_[i + 1], r);
}

NaturalCubicSpline::NaturalCubicSpline(Eigen::VectorXd x, Eigen::VectorXd y)
    : x_(std::move(x)), y_(std::move(y)) {
  const Eigen::Index n = x_.size();
  if (n < 3 || y_.size() != n) {
    throw std::invalid_argument("NaturalCubicSpline needs >= 3 matching samples");
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("spline abscissae must increase");
  }
  // Tridiagonal solve for second derivatives with zero end moments.
  second_ = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd diag(n), upper(n), rhs(n);
  diag.setOnes();
  upper.setZero();
  rhs.setZero();
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    const double lower = h0 / 6.0;
    diag[i] = (h0 + h1) / 3.0 - lower * upper[i - 1] / diag[i - 1];
    rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0 - lower * rhs[i - 1] / diag[i - 1];
    upper[i] = h1 / 6.0;
  }
  for (Eigen::Index i = n - 2; i >= 1; --i) {
    second_[i] = (rhs[i] - upper[i] * second_[i + 1]) / diag[i];
  }
}

double NaturalCubicSpline::operator()(double x) const {
  const double* begin = x_.data();
  const Eigen::Index n = x_.size();
  Eigen::Index i = static_cast<Eigen::Index>(std::upper_bound(begin, begin + n, x) - begin) - 1;
  i = std::clamp<Eigen::Index>(i, 0, n - 2);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) * h * h / 6.0;
}

}  // namespace warped
