#include "warped/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "warped/errors.hpp"
#include "warped/interpolation.hpp"
#include "warped/operators.hpp"
#include "warped/quadrature.hpp"
#include "warped/stencil.hpp"

namespace warped {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponentially weighted integrands e^{G(t) - G(s)} live in a layer of width
// ~1/G' next to the anchor, hence the graded panels.
template <typename F>
QuadratureResult<double> checked_integral(F&& f, double a, double b, double left_scale,
                                          double right_scale, double rel_tol,
                                          const char* what) {
  QuadratureOptions<double> opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = 1e-300;
  auto res = integrate_graded(f, a, b, left_scale, right_scale, opts);
  if (!res.converged || !std::isfinite(res.value)) {
    throw QuadratureError(what, res.worst_lower, res.worst_upper);
  }
  return res;
}

QuadratureResult<double> excess_integral(const MetricProfile& profile, double a, double b) {
  QuadratureOptions<double> opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-14;  // log phi rounding makes the integrand noisy near r = 0
  auto res = integrate_adaptive([&](double s) { return inverse_warp_excess(profile, s); }, a,
                                b, opts);
  if (!res.converged || !std::isfinite(res.value)) {
    throw QuadratureError("int (1/phi - 1/s) did not converge", res.worst_lower,
                          res.worst_upper);
  }
  return res;
}

double conditioning_floor(double g) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(g));
}

void check_grid(const MetricProfile& profile, const RadialGrid& grid) {
  if (grid.back() > profile.r_max() * (1.0 + 1e-14)) {
    throw DomainError(fmt::format("grid reaches r = {} beyond r_max = {}", grid.back(),
                                  profile.r_max()));
  }
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
double rms(const Eigen::VectorXd& v) {
  return v.size() ? std::sqrt(v.squaredNorm() / static_cast<double>(v.size())) : 0.0;
}

}  // namespace

double inverse_warp_excess(const MetricProfile& profile, double r) {
  return std::expm1(std::log(r) - profile.log_phi(r)) / r;
}

// ---------------------------------------------------------------------------

InverseWarpIntegral::InverseWarpIntegral(const MetricProfile& profile, double r_max,
                                         double tol) {
  if (!(r_max > 0.0) || r_max > profile.r_max()) {
    throw DomainError(fmt::format("inverse warp table: bad r_max {}", r_max));
  }
  std::vector<double> seeds{0.0};
  for (double r = r_max; r > 1e-6; r *= 0.5) seeds.push_back(r);
  if (r_max > 1.0) seeds.push_back(1.0);
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  struct Knot {
    double r, value, slope;
  };
  std::vector<Knot> out{{0.0, 0.0, 0.0}};

  auto accept = [&](const Knot& a, const Knot& b, const Knot& mid) {
    const double pred = hermite_cubic(a.r, a.value, a.slope, b.r, b.value, b.slope, mid.r);
    return std::abs(pred - mid.value) <= tol * std::max(1.0, std::abs(mid.value));
  };
  auto refine = [&](auto&& self, const Knot& a, const Knot& b, int depth) -> void {
    const double mid = 0.5 * (a.r + b.r);
    const Knot k{mid, a.value + excess_integral(profile, a.r, mid).value,
                 inverse_warp_excess(profile, mid)};
    if (depth >= 48 || (b.r - a.r) <= 1e-9 * std::max(1.0, b.r) || accept(a, b, k)) {
      out.push_back(b);
      return;
    }
    self(self, a, k, depth + 1);
    self(self, k, b, depth + 1);
  };

  for (std::size_t i = 1; i < seeds.size(); ++i) {
    const Knot a = out.back();
    const double r = seeds[i];
    const Knot b{r, a.value + excess_integral(profile, a.r, r).value,
                 inverse_warp_excess(profile, r)};
    refine(refine, a, b, 0);
  }

  knots_.reserve(out.size());
  values_.reserve(out.size());
  slopes_.reserve(out.size());
  for (const auto& k : out) {
    knots_.push_back(k.r);
    values_.push_back(k.value);
    slopes_.push_back(k.slope);
  }
  regular_at_one_ = regular(std::min(1.0, r_max));
  if (r_max < 1.0) regular_at_one_ += excess_integral(profile, r_max, 1.0).value;
}

double InverseWarpIntegral::regular(double r) const {
  if (r < 0.0 || r > knots_.back() * (1.0 + 1e-14)) {
    throw DomainError(fmt::format("inverse warp table: r = {} outside [0, {}]", r,
                                  knots_.back()));
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
  std::size_t i = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
  return hermite_cubic(knots_[i], values_[i], slopes_[i], knots_[i + 1], values_[i + 1],
                       slopes_[i + 1], r);
}

// ---------------------------------------------------------------------------

ModeSolver::ModeSolver(MetricProfile profile, double r_max, ModeOptions options)
    : profile_(std::move(profile)),
      options_(options),
      inverse_warp_(profile_, r_max, options.table_tol) {}

double ModeSolver::exponent(int m, double t) const {
  const double g = profile_.log_phi(t);
  return m == 0 ? g : g + 2.0 * std::abs(m) * inverse_warp_(t);
}

double ModeSolver::exponent_slope(int m, double t) const {
  const double d = profile_.log_derivative(t);
  return m == 0 ? d : d + 2.0 * std::abs(m) * std::exp(-profile_.log_phi(t));
}

LogMode ModeSolver::harmonic(int m, const RadialGrid& grid) const {
  return harmonic_log_mode(profile_, m, grid, options_);
}

LogMode harmonic_log_mode(const MetricProfile& profile, int m, const RadialGrid& grid,
                          const ModeOptions&) {
  check_grid(profile, grid);
  const Eigen::Index n = grid.size();
  LogMode mode{m, grid, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  const int k = std::abs(m);
  if (k == 0) return mode;

  // Cumulative int_0^r (1/phi - 1/s) through the nodes and r = 1.
  std::vector<double> points(grid.nodes().data(), grid.nodes().data() + n);
  points.push_back(1.0);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<double> value(points.size()), error(points.size());
  double prev = 0.0, acc = 0.0, acc_err = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] > 0.0) {
      const auto q = excess_integral(profile, prev, points[i]);
      acc += q.value;
      acc_err += q.error;
    }
    value[i] = acc;
    error[i] = acc_err;
    prev = points[i];
  }
  const auto at_one = std::lower_bound(points.begin(), points.end(), 1.0) - points.begin();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = grid[i];
    if (r == 0.0) {
      mode.lambda[i] = -kInf;
      mode.error[i] = 0.0;
      continue;
    }
    const auto j = std::lower_bound(points.begin(), points.end(), r) - points.begin();
    mode.lambda[i] = k * (std::log(r) + value[j] - value[at_one]);
    mode.error[i] = k * std::abs(error[j] - error[at_one]);
  }
  return mode;
}

ReductionFactor ModeSolver::reduction(int m, const RadialGrid& grid) const {
  check_grid(profile_, grid);
  const Eigen::Index n = grid.size();
  ReductionFactor out{m, grid, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n),
                      Eigen::VectorXd::Zero(n)};

  // w(b) = e^{G(a)-G(b)} w(a) + int_a^b e^{G(t)-G(b)} dt, z(b) = z(a) + int_a^b w.
  double a = 0.0, g_a = -kInf, w_a = 0.0, z_a = 0.0, err_w = 0.0, err_z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double b = grid[i];
    if (b == 0.0) continue;
    const double g_b = exponent(m, b);
    // e^{G(t) - G(s)} cannot be resolved below the rounding of G itself.
    const double floor = conditioning_floor(g_b);
    const double inner_tol = std::max(options_.rel_tol, floor);
    const double outer_tol = std::max(options_.outer_rel_tol, floor);
    double inner_err = 0.0;
    auto w_at = [&](double s) {
      const double g_s = exponent(m, s);
      const double carry = w_a > 0.0 ? w_a * std::exp(g_a - g_s) : 0.0;
      const auto inner = checked_integral(
          [&](double t) { return std::exp(exponent(m, t) - g_s); }, a, s, 0.0,
          1.0 / exponent_slope(m, s), inner_tol,
          "inner integral of the reduction factor did not converge");
      inner_err = std::max(inner_err, inner.error);
      return carry + inner.value;
    };
    const double layer = a > 0.0 ? 1.0 / exponent_slope(m, a) : 0.0;
    const auto outer = checked_integral(w_at, a, b, layer, 0.0, outer_tol,
                                        "reduction factor integral did not converge");
    const double w_b = w_at(b);
    err_z += outer.error + (b - a) * inner_err;
    err_w = err_w * (w_a > 0.0 ? std::exp(g_a - g_b) : 0.0) + inner_err;
    z_a += outer.value;
    if (!std::isfinite(z_a) || !std::isfinite(w_b)) {
      throw std::overflow_error(fmt::format("reduction factor overflowed at r = {}", b));
    }
    out.z[i] = z_a;
    out.w[i] = w_b;
    out.error[i] = err_z;
    a = b;
    g_a = g_b;
    w_a = w_b;
  }
  return out;
}

BiharmonicMode ModeSolver::biharmonic(int m, const RadialGrid& grid) const {
  LogMode h = harmonic(m, grid);
  ReductionFactor r = reduction(m, grid);
  BiharmonicMode mode{m, grid, std::move(h.lambda), std::move(r.z), std::move(r.w), {}, {}};
  mode.log_psi = mode.lambda.array() + mode.z.array().log();
  // Relative error of psi: that of exp(Lambda) plus that of z.
  mode.error = h.error.array() + r.error.array() / mode.z.array().max(1e-300);
  return mode;
}

double ModeSolver::mean_integral_ratio(double s) const {
  return warped::mean_integral_ratio(profile_, s, options_);
}

ModeSolver::Point ModeSolver::point(int m, double r) const {
  if (!(r > 0.0) || r > profile_.r_max()) {
    throw DomainError(fmt::format("mode point: r = {} outside (0, {}]", r, profile_.r_max()));
  }
  const auto grid = RadialGrid::from_nodes((Eigen::VectorXd(3) << r / 3, 2 * r / 3, r).finished());
  const double lambda =
      m == 0 ? 0.0 : std::abs(m) * (std::log(r) + excess_integral(profile_, 1.0, r).value);
  return {lambda, reduction(m, grid).z[2]};
}

// ---------------------------------------------------------------------------

ReductionFactor reduction_factor(const MetricProfile& profile, int m, const RadialGrid& grid,
                                 const ModeOptions& options) {
  return ModeSolver(profile, grid.back(), options).reduction(m, grid);
}

BiharmonicMode biharmonic_mode(const MetricProfile& profile, int m, const RadialGrid& grid,
                               const ModeOptions& options) {
  return ModeSolver(profile, grid.back(), options).biharmonic(m, grid);
}

double mean_integral_ratio(const MetricProfile& profile, double s, const ModeOptions&) {
  if (!(s > 0.0) || s > profile.r_max()) {
    throw DomainError(fmt::format("mean integral ratio: s = {} outside (0, {}]", s,
                                  profile.r_max()));
  }
  const double g_s = profile.log_phi(s);
  return checked_integral([&](double t) { return std::exp(profile.log_phi(t) - g_s); }, 0.0, s,
                          0.0, 1.0 / profile.log_derivative(s),
                          std::max(1e-12, conditioning_floor(g_s)),
                          "mean integral ratio did not converge")
      .value;
}

// ---------------------------------------------------------------------------

namespace {

RadialGrid interior_checked(const RadialGrid& grid, int m) {
  if (grid.size() < 5) throw std::invalid_argument("mode residuals need >= 5 nodes");
  if (m != 0 && grid.front() <= 0.0) {
    throw std::invalid_argument("mode residuals: grid must exclude r = 0 for m != 0");
  }
  return grid;
}

constexpr double kLinearLimit = 600.0;

}  // namespace

ModeResidualReport verify_mode_residuals(const MetricProfile& profile, const LogMode& mode) {
  const RadialGrid& grid = interior_checked(mode.grid, mode.m);
  const Eigen::Index n = grid.size();
  ModeResidualReport rep;
  rep.harmonic.resize(n - 2);
  if (mode.lambda.maxCoeff() < kLinearLimit) {
    const DerivativeStencil stencil(grid);
    const Eigen::VectorXd f = mode.lambda.array().exp();
    const Eigen::VectorXd lf = apply_radial_operator(profile, mode.m, grid, stencil, f);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      rep.harmonic[i - 1] = std::abs(lf[i]) / std::max(1.0, f[i]);
    }
  } else {
    const Eigen::VectorXd rel = relative_radial_laplacian(profile, mode.m, grid, mode.lambda);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      rep.harmonic[i - 1] = std::abs(rel[i]) * std::exp(std::min(0.0, mode.lambda[i]));
    }
  }
  rep.harmonic_max = max_abs(rep.harmonic);
  rep.harmonic_rms = rms(rep.harmonic);
  return rep;
}

ModeResidualReport verify_mode_residuals(const MetricProfile& profile,
                                         const BiharmonicMode& mode) {
  LogMode h{mode.m, mode.grid, mode.lambda, Eigen::VectorXd::Zero(mode.grid.size())};
  ModeResidualReport rep = verify_mode_residuals(profile, h);
  const RadialGrid& grid = mode.grid;
  const Eigen::Index n = grid.size();
  rep.biharmonic.resize(n - 2);
  if (mode.log_psi.maxCoeff() < kLinearLimit && mode.lambda.maxCoeff() < kLinearLimit) {
    const DerivativeStencil stencil(grid);
    const Eigen::VectorXd phi_m = mode.lambda.array().exp();
    const Eigen::VectorXd psi = mode.z.array() * phi_m.array();
    const Eigen::VectorXd lpsi = apply_radial_operator(profile, mode.m, grid, stencil, psi);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      rep.biharmonic[i - 1] = std::abs(lpsi[i] - phi_m[i]) / std::max(1.0, phi_m[i]);
    }
  } else {
    // L psi - phi_m = phi_m (z (L psi / psi) - 1).
    const Eigen::VectorXd rel = relative_radial_laplacian(profile, mode.m, grid, mode.log_psi);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      rep.biharmonic[i - 1] =
          std::abs(mode.z[i] * rel[i] - 1.0) * std::exp(std::min(0.0, mode.lambda[i]));
    }
  }
  rep.biharmonic_max = max_abs(rep.biharmonic);
  rep.biharmonic_rms = rms(rep.biharmonic);
  return rep;
}

// ---------------------------------------------------------------------------

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::bounded:
      return "bounded";
    case Verdict::unbounded:
      return "unbounded";
    case Verdict::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

Verdict convergence_verdict(double q_quarter, double q_half, double q_full,
                            const ConvergenceRule& rule) {
  if (!std::isfinite(q_quarter) || !std::isfinite(q_half) || !std::isfinite(q_full)) {
    return std::isinf(q_full) ? Verdict::unbounded : Verdict::undetermined;
  }
  const double scale = std::abs(q_full);
  const double inc1 = std::abs(q_half - q_quarter);
  const double inc2 = std::abs(q_full - q_half);
  if (inc1 <= rule.converge_rel * scale && inc2 <= rule.converge_rel * scale) {
    return Verdict::bounded;
  }
  if (inc2 > rule.diverge_rel * scale && inc2 >= rule.stay_ratio * inc1) {
    return Verdict::unbounded;
  }
  return Verdict::undetermined;
}

Verdict log_convergence_verdict(double log_quarter, double log_half, double log_full,
                                const ConvergenceRule& rule) {
  if (std::isnan(log_quarter) || std::isnan(log_half) || std::isnan(log_full) ||
      !std::isfinite(log_full)) {
    return log_full == kInf ? Verdict::unbounded : Verdict::undetermined;
  }
  return convergence_verdict(std::exp(log_quarter - log_full), std::exp(log_half - log_full),
                             1.0, rule);
}

}  // namespace warped
