#include "warped/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "warped/errors.hpp"
#include "warped/interpolation.hpp"
#include "warped/ode.hpp"
#include "warped/stencil.hpp"

namespace warped {

MetricProfile::MetricProfile(std::shared_ptr<const Model> model, std::string name,
                             ProfileSource source, double r_max)
    : model_(std::move(model)), name_(std::move(name)), source_(source), r_max_(r_max) {
  if (!model_) throw std::invalid_argument("MetricProfile: null model");
  if (!(r_max_ > 0.0) || !std::isfinite(r_max_)) {
    throw std::invalid_argument("MetricProfile: r_max must be positive and finite");
  }
}

double MetricProfile::checked(double r) const {
  if (!(r > 0.0) || r > r_max_) {
    throw DomainError(fmt::format("radius {:.6g} outside (0, {:.6g}] for profile '{}'", r,
                                  r_max_, name_));
  }
  return r;
}

namespace {

class AnalyticModel final : public MetricProfile::Model {
 public:
  explicit AnalyticModel(AnalyticWarp warp) : warp_(std::move(warp)) {
    if (!warp_.phi || !warp_.phi_prime || !warp_.phi_second) {
      throw std::invalid_argument("analytic profile needs phi, phi' and phi''");
    }
  }
  double phi(double r) const override { return warp_.phi(r); }
  double phi_prime(double r) const override { return warp_.phi_prime(r); }
  double phi_second(double r) const override { return warp_.phi_second(r); }
  double log_phi(double r) const override {
    return warp_.log_phi ? warp_.log_phi(r) : std::log(warp_.phi(r));
  }
  double log_derivative(double r) const override {
    return warp_.log_derivative ? warp_.log_derivative(r) : warp_.phi_prime(r) / warp_.phi(r);
  }
  double curvature(double r) const override {
    return warp_.curvature ? warp_.curvature(r) : -warp_.phi_second(r) / warp_.phi(r);
  }

 private:
  AnalyticWarp warp_;
};

// Warp function stored in Prüfer form phi = rho sin(theta), phi' = rho cos(theta):
//   theta'     = cos^2(theta) + K sin^2(theta)
//   (log rho)' = (1 - K) sin(theta) cos(theta)
// Both stay finite while phi overflows, and phi = 0 is the regular event theta = pi.
class IntegratedModel final : public MetricProfile::Model {
 public:
  struct Knot {
    double r, theta, log_rho, dtheta, dlog_rho, d2theta, d2log_rho;
    double stiffness;  // |d theta' / d theta|
  };

  IntegratedModel(std::function<double(double)> curvature, double start, double k0,
                  std::vector<Knot> knots)
      : curvature_(std::move(curvature)), start_(start), k0_(k0), knots_(std::move(knots)) {}

  double phi(double r) const override { return std::exp(log_phi(r)); }
  double phi_prime(double r) const override {
    if (r < start_) return 1.0 - 0.5 * k0_ * r * r;
    const auto s = state(r);
    return std::exp(s[1]) * std::cos(s[0]);
  }
  double phi_second(double r) const override { return -curvature_(r) * phi(r); }
  double log_phi(double r) const override {
    if (r < start_) return std::log(r - k0_ * r * r * r / 6.0);
    const auto s = state(r);
    return s[1] + std::log(std::sin(s[0]));
  }
  double log_derivative(double r) const override {
    if (r < start_) return (1.0 - 0.5 * k0_ * r * r) / (r - k0_ * r * r * r / 6.0);
    const auto s = state(r);
    return std::cos(s[0]) / std::sin(s[0]);
  }
  double curvature(double r) const override { return curvature_(r); }

 private:
  std::array<double, 2> state(double r) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), r,
                               [](double x, const Knot& k) { return x < k.r; });
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, knots_.size() - 2);
    const Knot& a = knots_[i];
    const Knot& b = knots_[i + 1];
    // Where the angle equation is stiff across the panel, step-to-step jitter
    // of the integrator dominates the second derivatives; stay cubic there.
    if (std::max(a.stiffness, b.stiffness) * (b.r - a.r) > 1.0) {
      return {hermite_cubic(a.r, a.theta, a.dtheta, b.r, b.theta, b.dtheta, r),
              hermite_cubic(a.r, a.log_rho, a.dlog_rho, b.r, b.log_rho, b.dlog_rho, r)};
    }
    return {hermite_quintic(a.r, a.theta, a.dtheta, a.d2theta, b.r, b.theta, b.dtheta,
                            b.d2theta, r),
            hermite_quintic(a.r, a.log_rho, a.dlog_rho, a.d2log_rho, b.r, b.log_rho,
                            b.dlog_rho, b.d2log_rho, r)};
  }

  std::function<double(double)> curvature_;
  double start_;
  double k0_;
  std::vector<Knot> knots_;
};

double smoothstep5(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

std::function<double(double)> blended(std::function<double(double)> tail, double r0) {
  const double cap = tail(r0 + 1.0);
  return [tail = std::move(tail), r0, cap](double r) {
    if (r <= r0) return cap;
    if (r >= r0 + 1.0) return tail(r);
    return cap + (tail(r) - cap) * smoothstep5(r - r0);
  };
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(fmt::format("{} must be positive, got {}", what, value));
  }
}

}  // namespace

MetricProfile analytic_profile(std::string name, AnalyticWarp warp, double r_max) {
  return MetricProfile(std::make_shared<AnalyticModel>(std::move(warp)), std::move(name),
                       ProfileSource::analytic, r_max);
}

const char* to_string(TailClass cls) {
  switch (cls) {
    case TailClass::log_lower: return "log_lower";
    case TailClass::log_upper: return "log_upper";
    case TailClass::band: return "band";
    case TailClass::power: return "power";
    case TailClass::custom: return "custom";
  }
  return "custom";
}

bool TailDescriptor::satisfied(double r, double k, double rel_tol) const {
  if (!std::isfinite(k)) return false;
  auto below = [&](double bound) { return k <= bound + rel_tol * std::abs(bound); };
  auto above = [&](double bound) { return k >= bound - rel_tol * std::abs(bound); };
  const bool log_defined = r > 1.0;
  switch (cls) {
    case TailClass::log_lower:
      return log_defined && above(-1.0 / (r * r * std::log(r)));
    case TailClass::log_upper:
      return log_defined && below(-(1.0 + eps) / (r * r * std::log(r)));
    case TailClass::band:
      return log_defined && above(-eta * r * r) && below(-(1.0 + eps) / (r * r * std::log(r)));
    case TailClass::power:
      return below(-std::pow(r, 2.0 + eps));
    case TailClass::custom:
      return false;
  }
  return false;
}

CurvatureProfile::CurvatureProfile(std::function<double(double)> curvature, std::string name,
                                   std::optional<TailDescriptor> tail)
    : curvature_(std::move(curvature)), name_(std::move(name)), tail_(std::move(tail)) {
  if (!curvature_) throw std::invalid_argument("CurvatureProfile: empty evaluator");
}

TailCheck verify_tail(const std::function<double(double)>& curvature,
                      const TailDescriptor& tail, double horizon, std::size_t samples) {
  TailCheck check;
  if (tail.cls == TailClass::custom || !(horizon > tail.r0) || samples < 2) return check;
  const double lo = std::log(tail.r0);
  const double hi = std::log(horizon);
  check.holds = true;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                       static_cast<double>(samples - 1));
    ++check.samples;
    if (!tail.satisfied(r, curvature(r))) {
      check.holds = false;
      check.first_violation = r;
      break;
    }
  }
  return check;
}

MetricProfile profile_from_curvature(const CurvatureProfile& curvature, double r_max,
                                     const StepControl& control) {
  require_positive(r_max, "r_max");
  require_positive(control.rel_tol, "rel_tol");
  require_positive(control.abs_tol, "abs_tol");
  require_positive(control.start_radius, "start_radius");
  require_positive(control.max_step, "max_step");
  const double h0 = control.start_radius;
  if (h0 >= r_max) throw std::invalid_argument("start radius must be below r_max");

  double k0 = curvature(0.0);
  if (!std::isfinite(k0)) k0 = curvature(h0);
  if (!std::isfinite(k0)) throw IntegrationError("curvature is not finite near the origin");

  using Vec = Eigen::Vector2d;
  auto rhs = [&curvature](double r, const Vec& y) -> Vec {
    const double k = curvature(r);
    if (!std::isfinite(k)) {
      throw IntegrationError(fmt::format("curvature not finite at r = {:.6g}", r));
    }
    const double s = std::sin(y[0]);
    const double c = std::cos(y[0]);
    return Vec(c * c + k * s * s, (1.0 - k) * s * c);
  };

  // Two-term series at the start radius.
  const double phi0 = h0 - k0 * h0 * h0 * h0 / 6.0;
  const double dphi0 = 1.0 - 0.5 * k0 * h0 * h0;
  const Vec y0(std::atan2(phi0, dphi0), 0.5 * std::log(phi0 * phi0 + dphi0 * dphi0));
  const Vec dy0 = rhs(h0, y0);

  // Second derivatives of the Pruefer state, so the knots carry quintic
  // Hermite data and phi'' of the interpolant stays consistent with -K phi.
  auto knot = [&curvature](double r, const Vec& y, const Vec& dy) {
    const double delta = std::min(1e-5 * std::max(1.0, r), 0.5 * r);
    const double dk = (curvature(r + delta) - curvature(r - delta)) / (2.0 * delta);
    const double k = curvature(r);
    const double s = std::sin(y[0]);
    const double c = std::cos(y[0]);
    const double d2theta = dk * s * s + 2.0 * (k - 1.0) * s * c * dy[0];
    const double d2log_rho = -dk * s * c + (1.0 - k) * (c * c - s * s) * dy[0];
    const double stiffness = std::abs(2.0 * (k - 1.0) * s * c);
    return IntegratedModel::Knot{r, y[0], y[1], dy[0], dy[1], d2theta, d2log_rho, stiffness};
  };

  std::vector<IntegratedModel::Knot> knots;
  knots.push_back(knot(h0, y0, dy0));

  OdeOptions<double> options;
  options.rel_tol = control.rel_tol;
  options.abs_tol = control.abs_tol;
  options.initial_step = 0.1 * h0;
  options.max_step = control.max_step;

  constexpr double kPi = std::numbers::pi;
  auto observer = [&](double t0, const Vec& y0s, const Vec& d0, double t1, const Vec& y1,
                      const Vec& d1) {
    if (y1[0] >= kPi) {
      // theta crosses pi: phi vanishes. Locate on the step's Hermite interpolant.
      double lo = t0, hi = t1;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double th = hermite_cubic(t0, y0s[0], d0[0], t1, y1[0], d1[0], mid);
        (th >= kPi ? hi : lo) = mid;
      }
      throw ConjugatePointError(0.5 * (lo + hi));
    }
    const double spacing = 1e-4 * std::max(1.0, t1);
    if (t1 - knots.back().r >= spacing || t1 >= r_max) {
      knots.push_back(knot(t1, y1, d1));
    }
    return true;
  };
  integrate_dopri5<double, 2>(rhs, h0, y0, r_max, options, observer);
  if (knots.back().r < r_max) {
    // Final thinned step always lands on r_max; this only guards rounding.
    knots.back().r = r_max;
  }
  if (knots.size() < 2) throw IntegrationError("curvature ODE produced no steps");

  auto model = std::make_shared<IntegratedModel>(
      [curvature](double r) { return curvature(r); }, h0, k0, std::move(knots));
  return MetricProfile(std::move(model), curvature.name(), ProfileSource::curvature_integrated,
                       r_max);
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"euclidean", "hyperbolic", "log-threshold",
                                                 "power-curvature", "quadratic-curvature"};
  return names;
}

CurvatureProfile builtin_curvature(const std::string& name, const BuiltinParams& params) {
  if (name == "euclidean") {
    return CurvatureProfile([](double) { return 0.0; }, name,
                            TailDescriptor{TailClass::log_lower, 0.0, 0.0, 2.0});
  }
  if (name == "hyperbolic") {
    return CurvatureProfile([](double) { return -1.0; }, name,
                            TailDescriptor{TailClass::band, 1.0, 1.0, 2.0});
  }
  if (name == "log-threshold") {
    require_positive(params.eps, "eps");
    const double r0 = params.r0.value_or(2.0);
    if (r0 < 2.0) throw std::invalid_argument("log-threshold needs R0 >= 2");
    const double c = 1.0 + params.eps;
    auto tail = [c](double r) { return -c / (r * r * std::log(r)); };
    return CurvatureProfile(blended(tail, r0), name,
                            TailDescriptor{TailClass::band, params.eps, 1.0, r0 + 1.0});
  }
  if (name == "power-curvature") {
    require_positive(params.eps, "eps");
    const double r0 = params.r0.value_or(1.0);
    require_positive(r0, "R0");
    const double p = 2.0 + params.eps;
    auto tail = [p](double r) { return -std::pow(r, p); };
    return CurvatureProfile(blended(tail, r0), name,
                            TailDescriptor{TailClass::power, params.eps, 0.0, r0 + 1.0});
  }
  if (name == "quadratic-curvature") {
    require_positive(params.eta, "eta");
    const double r0 = params.r0.value_or(1.0);
    require_positive(r0, "R0");
    const double eta = params.eta;
    auto tail = [eta](double r) { return -eta * r * r; };
    return CurvatureProfile(blended(tail, r0), name,
                            TailDescriptor{TailClass::band, 1.0, eta, std::max(r0 + 1.0, 2.0)});
  }
  throw std::invalid_argument(fmt::format("unknown built-in profile '{}'", name));
}

Surface builtin_surface(const std::string& name, const BuiltinParams& params, double r_max,
                        const StepControl& control) {
  CurvatureProfile curvature = builtin_curvature(name, params);
  if (name == "euclidean") {
    AnalyticWarp warp{[](double r) { return r; },
                      [](double) { return 1.0; },
                      [](double) { return 0.0; },
                      [](double r) { return std::log(r); },
                      [](double r) { return 1.0 / r; },
                      [](double) { return 0.0; }};
    return {analytic_profile(name, std::move(warp), r_max), std::move(curvature)};
  }
  if (name == "hyperbolic") {
    AnalyticWarp warp{[](double r) { return std::sinh(r); },
                      [](double r) { return std::cosh(r); },
                      [](double r) { return std::sinh(r); },
                      [](double r) {
                        if (r < 1.0) return std::log(std::sinh(r));
                        return r + std::log1p(-std::exp(-2.0 * r)) - std::numbers::ln2;
                      },
                      [](double r) { return 1.0 / std::tanh(r); },
                      [](double) { return -1.0; }};
    return {analytic_profile(name, std::move(warp), r_max), std::move(curvature)};
  }
  MetricProfile profile = profile_from_curvature(curvature, r_max, control);
  return {std::move(profile), std::move(curvature)};
}

double curvature_of(const MetricProfile& profile, double r) { return profile.curvature(r); }

double log_derivative(const MetricProfile& profile, double r) {
  return profile.log_derivative(r);
}

OriginReport check_origin_smoothness(const MetricProfile& profile, double h, double tolerance) {
  if (!(h > 0.0) || h > profile.r_max() / 10.0) {
    throw std::invalid_argument("origin check needs 0 < h <= r_max / 10");
  }
  const std::array<double, 4> nodes = {h, 2.0 * h, 3.0 * h, 4.0 * h};
  const auto w = fornberg_weights<double, 4>(0.0, nodes);
  OriginReport report;
  report.h = h;
  report.tolerance = tolerance;
  for (int k = 0; k < 4; ++k) {
    const double f = profile.phi(nodes[k]);
    report.phi0 += w[0][k] * f;
    report.phi_prime0 += w[1][k] * f;
    report.phi_second0 += w[2][k] * f;
  }
  report.phi0_ok = std::abs(report.phi0) <= tolerance;
  report.phi_prime0_ok = std::abs(report.phi_prime0 - 1.0) <= tolerance;
  report.phi_second0_ok = std::abs(report.phi_second0) <= tolerance;
  return report;
}

DerivativeConsistency check_derivative_consistency(const MetricProfile& profile,
                                                   const RadialGrid& grid, double h) {
  DerivativeConsistency out;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    if (r - h <= 0.0 || r + h > profile.r_max()) continue;
    const double fm = profile.phi(r - h);
    const double f0 = profile.phi(r);
    const double fp = profile.phi(r + h);
    const double d1 = (fp - fm) / (2.0 * h);
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    const double p1 = profile.phi_prime(r);
    const double p2 = profile.phi_second(r);
    out.max_phi_prime_error =
        std::max(out.max_phi_prime_error, std::abs(d1 - p1) / std::max(1.0, std::abs(p1)));
    out.max_phi_second_error =
        std::max(out.max_phi_second_error, std::abs(d2 - p2) / std::max(1.0, std::abs(p2)));
  }
  return out;
}

}  // namespace warped
