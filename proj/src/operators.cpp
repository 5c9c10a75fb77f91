#include "warped/operators.hpp"

#include <algorithm>
#include <cmath>

namespace warped {

RadialFunctionSamples RadialFunctionSamples::linear(RadialGrid grid, Eigen::VectorXd values) {
  RadialFunctionSamples s{std::move(grid), std::move(values), Representation::linear, {}, {}};
  s.validate();
  return s;
}

RadialFunctionSamples RadialFunctionSamples::logarithmic(RadialGrid grid,
                                                         Eigen::VectorXd log_values) {
  RadialFunctionSamples s{std::move(grid), std::move(log_values), Representation::logarithmic,
                          {}, {}};
  s.validate();
  return s;
}

void RadialFunctionSamples::validate() const {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("RadialFunctionSamples: values length differs from grid");
  }
  if (!values.allFinite()) {
    throw std::invalid_argument("RadialFunctionSamples: non-finite sample");
  }
  if (log_slope && log_slope->size() != grid.size()) {
    throw std::invalid_argument("RadialFunctionSamples: log_slope length differs from grid");
  }
  if (second_ratio && second_ratio->size() != grid.size()) {
    throw std::invalid_argument("RadialFunctionSamples: second_ratio length differs from grid");
  }
}

Eigen::VectorXd RadialFunctionSamples::linear_values() const {
  return representation == Representation::linear ? values
                                                  : Eigen::VectorXd(values.array().exp());
}

RadialFunctionSamples radial_laplacian_apply(const MetricProfile& profile, int m,
                                             const RadialFunctionSamples& f) {
  if (f.grid.size() < 5) throw std::invalid_argument("radial Laplacian needs >= 5 nodes");
  f.validate();
  const DerivativeStencil stencil(f.grid);
  if (f.representation == Representation::linear) {
    return RadialFunctionSamples{f.grid,
                                 apply_radial_operator(profile, m, f.grid, stencil, f.values),
                                 Representation::linear,
                                 {},
                                 {}};
  }
  const Eigen::VectorXd rel = relative_radial_laplacian(profile, m, f.grid, f.values);
  Eigen::VectorXd out = rel.array() * f.values.array().exp();
  return RadialFunctionSamples{f.grid, std::move(out), Representation::linear, {}, {}};
}

Eigen::VectorXd relative_radial_laplacian(const MetricProfile& profile, int m,
                                          const RadialGrid& grid,
                                          const Eigen::VectorXd& log_values) {
  if (grid.size() < 5) throw std::invalid_argument("radial Laplacian needs >= 5 nodes");
  if (grid.front() <= 0.0) {
    throw std::invalid_argument("log-form radial Laplacian needs a grid excluding r = 0");
  }
  if (log_values.size() != grid.size() || !log_values.allFinite()) {
    throw std::invalid_argument("log-form radial Laplacian: bad samples");
  }
  const DerivativeStencil stencil(grid);
  const Eigen::VectorXd g1 = stencil.first(log_values);
  const Eigen::VectorXd g2 = stencil.second(log_values);
  const double m2 = static_cast<double>(m) * m;
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double inv_phi2 = m2 == 0.0 ? 0.0 : std::exp(-2.0 * profile.log_phi(r));
    out[i] = g2[i] + g1[i] * g1[i] + profile.log_derivative(r) * g1[i] - m2 * inv_phi2;
  }
  return out;
}

namespace {

struct LogDerivatives {
  Eigen::VectorXd slope;   // f'/f
  Eigen::VectorXd second;  // f''/f
};

LogDerivatives log_derivatives(const RadialFunctionSamples& s) {
  if (s.representation == Representation::linear && (s.values.array() <= 0.0).any()) {
    throw std::invalid_argument("sturm_compare: samples must be positive");
  }
  LogDerivatives out;
  if (s.log_slope && s.second_ratio) {
    out.slope = *s.log_slope;
    out.second = *s.second_ratio;
    return out;
  }
  const DerivativeStencil stencil(s.grid);
  if (s.representation == Representation::linear) {
    out.slope = stencil.first(s.values).cwiseQuotient(s.values);
    out.second = stencil.second(s.values).cwiseQuotient(s.values);
  } else {
    const Eigen::VectorXd g1 = stencil.first(s.values);
    out.slope = g1;
    out.second = stencil.second(s.values).array() + g1.array().square();
  }
  if (s.log_slope) out.slope = *s.log_slope;
  if (s.second_ratio) out.second = *s.second_ratio;
  return out;
}

bool at_most(double lhs, double rhs, double rel_tol) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return lhs <= rhs + rel_tol * scale;
}

}  // namespace

SturmReport sturm_compare(const RadialFunctionSamples& f, const RadialFunctionSamples& h,
                          double a, const SturmOptions& options) {
  f.validate();
  h.validate();
  if (f.grid.size() != h.grid.size() || f.grid.nodes() != h.grid.nodes()) {
    throw std::invalid_argument("sturm_compare: f and h must share a grid");
  }
  if (f.grid.size() < 4) throw std::invalid_argument("sturm_compare: need >= 4 nodes");
  if (std::abs(f.grid.front() - a) > 1e-12 * std::max(1.0, std::abs(a))) {
    throw std::invalid_argument("sturm_compare: grid must start at a");
  }
  const LogDerivatives df = log_derivatives(f);
  const LogDerivatives dh = log_derivatives(h);

  const Eigen::Index n = f.grid.size();
  SturmReport report;
  report.ratio_ok.assign(static_cast<std::size_t>(n), true);
  report.conclusion_ok.assign(static_cast<std::size_t>(n), true);
  report.initial_slope_ordered = at_most(df.slope[0], dh.slope[0], options.rel_tol);
  report.ratio_hypothesis = true;
  report.conclusion = true;
  for (Eigen::Index i = 1; i < n; ++i) {
    const bool ratio = at_most(df.second[i], dh.second[i], options.rel_tol);
    const bool concl = at_most(df.slope[i], dh.slope[i], options.rel_tol);
    report.ratio_ok[static_cast<std::size_t>(i)] = ratio;
    report.conclusion_ok[static_cast<std::size_t>(i)] = concl;
    if (!ratio && !report.first_ratio_violation) report.first_ratio_violation = i;
    if (!concl && !report.first_conclusion_violation) report.first_conclusion_violation = i;
    report.ratio_hypothesis = report.ratio_hypothesis && ratio;
    report.conclusion = report.conclusion && concl;
  }
  return report;
}

}  // namespace warped
