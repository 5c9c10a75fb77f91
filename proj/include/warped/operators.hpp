#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "warped/geometry.hpp"
#include "warped/grid.hpp"
#include "warped/stencil.hpp"

namespace warped {

enum class Representation { linear, logarithmic };

/// Samples of a radial factor f(r) in u = f(r) e^{i m theta}.
///
/// Logarithmic samples hold log f and are only valid for positive f. A
/// producer that knows f'/f and f''/f exactly may attach them; consumers that
/// need derivatives prefer them over finite differences.
struct RadialFunctionSamples {
  RadialGrid grid;
  Eigen::VectorXd values;
  Representation representation = Representation::linear;
  std::optional<Eigen::VectorXd> log_slope;     // f'/f
  std::optional<Eigen::VectorXd> second_ratio;  // f''/f

  static RadialFunctionSamples linear(RadialGrid grid, Eigen::VectorXd values);
  static RadialFunctionSamples logarithmic(RadialGrid grid, Eigen::VectorXd log_values);

  /// Throws std::invalid_argument on a length mismatch or non-finite values.
  void validate() const;
  /// exp-ed values for the logarithmic representation.
  Eigen::VectorXd linear_values() const;
};

/// L_m f = f'' + (phi'/phi) f' - (m^2/phi^2) f on the grid's nodes, with the
/// stencils of DerivativeStencil. Works for real or complex samples.
///
/// At a node r = 0 (m = 0 only) the regular limit L_0 f(0) = 2 f''(0) is used.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_radial_operator(
    const MetricProfile& profile, int m, const RadialGrid& grid,
    const DerivativeStencil& stencil, const Eigen::MatrixBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = grid.size();
  if (f.size() != n) throw std::invalid_argument("radial operator: sample length mismatch");
  if (m != 0 && grid.front() <= 0.0) {
    throw std::invalid_argument("radial operator: grid must exclude r = 0 for m != 0");
  }
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d1 = stencil.first(f);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d2 = stencil.second(f);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = grid[i];
    if (r == 0.0) {
      out[i] = Scalar(2.0) * d2[i];
      continue;
    }
    const double slope = profile.log_derivative(r);
    const double inv_phi2 = m2 == 0.0 ? 0.0 : std::exp(-2.0 * profile.log_phi(r));
    out[i] = d2[i] + slope * d1[i] - (m2 * inv_phi2) * f(i);
  }
  return out;
}

/// Preconditions: >= 5 nodes, finite samples, grid excludes 0 when m != 0.
/// Logarithmic input is differentiated in log form and returned linear (may
/// overflow to +-inf for huge f; use relative_radial_laplacian instead).
RadialFunctionSamples radial_laplacian_apply(const MetricProfile& profile, int m,
                                             const RadialFunctionSamples& f);

/// (L_m f) / f from log f, computed as g'' + g'^2 + (phi'/phi) g' - m^2/phi^2.
Eigen::VectorXd relative_radial_laplacian(const MetricProfile& profile, int m,
                                          const RadialGrid& grid,
                                          const Eigen::VectorXd& log_values);

struct SturmOptions {
  double rel_tol = 1e-9;
};

/// Outcome of checking the comparison lemma on sampled f, h over [a, ...).
struct SturmReport {
  std::vector<bool> ratio_ok;       // f''/f <= h''/h, per node (node 0 is r = a)
  std::vector<bool> conclusion_ok;  // f'/f <= h'/h, per node
  bool initial_slope_ordered = false;
  bool ratio_hypothesis = false;  // over r > a
  bool conclusion = false;        // over r > a
  std::optional<Eigen::Index> first_ratio_violation;
  std::optional<Eigen::Index> first_conclusion_violation;

  bool hypotheses_hold() const { return initial_slope_ordered && ratio_hypothesis; }
  /// The lemma itself: hypotheses imply conclusion.
  bool consistent() const { return !hypotheses_hold() || conclusion; }
};

SturmReport sturm_compare(const RadialFunctionSamples& f, const RadialFunctionSamples& h,
                          double a, const SturmOptions& options = {});

}  // namespace warped
