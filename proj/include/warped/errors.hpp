#pragma once

#include <stdexcept>
#include <string>

namespace warped {

/// Radius (or other argument) outside the domain where an evaluator is valid.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The warp function vanished at r* > 0: the polar metric degenerates there.
class ConjugatePointError : public std::runtime_error {
 public:
  explicit ConjugatePointError(double radius);
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

/// Step-size underflow or step budget exhausted in the curvature ODE.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature did not reach its tolerance; carries the worst interval.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double a, double b);
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace warped
