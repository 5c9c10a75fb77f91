#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "warped/grid.hpp"

namespace warped {

enum class ProfileSource { analytic, curvature_integrated };

/// Rotationally symmetric metric dr^2 + phi(r)^2 dtheta^2 on (0, r_max].
///
/// Fast-growing warp functions overflow double precision long before the
/// geometry stops being interesting, so the primary evaluators are log_phi and
/// the log-derivative phi'/phi. phi, phi' and phi'' are exp-derived views and
/// may be +inf. Immutable; copies share the underlying model.
class MetricProfile {
 public:
  class Model {
   public:
    virtual ~Model() = default;
    virtual double phi(double r) const = 0;
    virtual double phi_prime(double r) const = 0;
    virtual double phi_second(double r) const = 0;
    virtual double log_phi(double r) const = 0;
    virtual double log_derivative(double r) const = 0;
    virtual double curvature(double r) const = 0;
  };

  MetricProfile(std::shared_ptr<const Model> model, std::string name, ProfileSource source,
                double r_max);

  double phi(double r) const { return model_->phi(checked(r)); }
  double phi_prime(double r) const { return model_->phi_prime(checked(r)); }
  double phi_second(double r) const { return model_->phi_second(checked(r)); }
  double log_phi(double r) const { return model_->log_phi(checked(r)); }
  /// phi'(r) / phi(r).
  double log_derivative(double r) const { return model_->log_derivative(checked(r)); }
  /// Gaussian curvature -phi''/phi.
  double curvature(double r) const { return model_->curvature(checked(r)); }

  double r_max() const noexcept { return r_max_; }
  ProfileSource source() const noexcept { return source_; }
  const std::string& name() const noexcept { return name_; }

 private:
  double checked(double r) const;

  std::shared_ptr<const Model> model_;
  std::string name_;
  ProfileSource source_;
  double r_max_;
};

/// Closed-form warp function. The log-space and curvature evaluators are
/// optional; when absent they are derived from phi, phi', phi''.
struct AnalyticWarp {
  std::function<double(double)> phi;
  std::function<double(double)> phi_prime;
  std::function<double(double)> phi_second;
  std::function<double(double)> log_phi;
  std::function<double(double)> log_derivative;
  std::function<double(double)> curvature;
};

MetricProfile analytic_profile(std::string name, AnalyticWarp warp, double r_max);

// ---------------------------------------------------------------------------
// Curvature

enum class TailClass {
  log_lower,  // K >= -1/(r^2 log r)
  log_upper,  // K <= -(1+eps)/(r^2 log r)
  band,       // -eta r^2 <= K <= -(1+eps)/(r^2 log r)
  power,      // K <= -r^(2+eps)
  custom,     // no usable inequality
};

const char* to_string(TailClass cls);

/// Declared asymptotic class of K, holding for r >= r0.
struct TailDescriptor {
  TailClass cls = TailClass::custom;
  double eps = 0.0;
  double eta = 0.0;
  double r0 = 2.0;

  /// Whether the declared inequality holds for curvature value k at radius r,
  /// with a relative slack `rel_tol` on the bound.
  bool satisfied(double r, double k, double rel_tol = 1e-12) const;
};

class CurvatureProfile {
 public:
  CurvatureProfile(std::function<double(double)> curvature, std::string name,
                   std::optional<TailDescriptor> tail = std::nullopt);

  double operator()(double r) const { return curvature_(r); }
  const std::optional<TailDescriptor>& tail() const noexcept { return tail_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::function<double(double)> curvature_;
  std::string name_;
  std::optional<TailDescriptor> tail_;
};

struct TailCheck {
  bool holds = false;
  double first_violation = 0.0;  // radius of the first failing sample, if any
  std::size_t samples = 0;
};

/// Sample K at log-spaced radii in [tail.r0, horizon] and test the declared
/// inequality at every sample.
TailCheck verify_tail(const std::function<double(double)>& curvature,
                      const TailDescriptor& tail, double horizon, std::size_t samples = 512);

// ---------------------------------------------------------------------------
// Construction

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double start_radius = 1e-6;
  // Longest ODE step. Steps double as the knots of the Hermite interpolant that
  // evaluates phi, so this bounds its O(step^4) error as well.
  double max_step = 0.02;
};

/// Integrate phi'' = -K phi from phi(0)=0, phi'(0)=1 up to r_max.
/// Throws ConjugatePointError if phi vanishes at some r* in (0, r_max] and
/// IntegrationError on step underflow.
MetricProfile profile_from_curvature(const CurvatureProfile& curvature, double r_max,
                                     const StepControl& control = {});

/// A surface: the metric and, when known, the curvature it was built from.
struct Surface {
  MetricProfile profile;
  std::optional<CurvatureProfile> curvature;
};

struct BuiltinParams {
  double eps = 1.0;
  double eta = 1.0;
  std::optional<double> r0;
};

const std::vector<std::string>& builtin_names();

/// Curvature of a built-in family: K equals a constant cap on [0, R0], the
/// declared tail for r >= R0 + 1 and a C^2 quintic blend in between. The cap
/// is the tail value at R0 + 1.
CurvatureProfile builtin_curvature(const std::string& name, const BuiltinParams& params = {});

/// euclidean and hyperbolic are analytic; the other families are integrated
/// from their curvature.
Surface builtin_surface(const std::string& name, const BuiltinParams& params, double r_max,
                        const StepControl& control = {});

// ---------------------------------------------------------------------------
// Interrogation

/// -phi''/phi at r; DomainError outside (0, r_max].
double curvature_of(const MetricProfile& profile, double r);

/// phi'/phi at r; DomainError outside (0, r_max].
double log_derivative(const MetricProfile& profile, double r);

struct OriginReport {
  double h = 0.0;
  double tolerance = 0.0;
  double phi0 = 0.0;
  double phi_prime0 = 0.0;
  double phi_second0 = 0.0;
  bool phi0_ok = false;
  bool phi_prime0_ok = false;
  bool phi_second0_ok = false;
  bool passed() const { return phi0_ok && phi_prime0_ok && phi_second0_ok; }
};

/// Extrapolate phi, phi', phi'' to r = 0 from samples at h, 2h, 3h, 4h and
/// compare against (0, 1, 0).
OriginReport check_origin_smoothness(const MetricProfile& profile, double h,
                                     double tolerance = 1e-5);

struct DerivativeConsistency {
  double max_phi_prime_error = 0.0;   // relative to max(1, |phi'|)
  double max_phi_second_error = 0.0;  // relative to max(1, |phi''|)
};

/// Compare phi' and phi'' against centered finite differences of phi at the
/// grid nodes (step h). Errors should scale like h^2.
DerivativeConsistency check_derivative_consistency(const MetricProfile& profile,
                                                   const RadialGrid& grid, double h);

}  // namespace warped
