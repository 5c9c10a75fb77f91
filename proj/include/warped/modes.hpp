#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "warped/geometry.hpp"
#include "warped/grid.hpp"

namespace warped {

struct ModeOptions {
  double rel_tol = 1e-13;    // inner quadratures
  double outer_rel_tol = 1e-12;
  double table_tol = 1e-13;  // Hermite table of int (1/phi - 1/s)
};

/// A(r) = int_1^r ds / phi(s), evaluated anywhere in (0, r_max].
///
/// Split as log r + B(r) - B(1) with B(r) = int_0^r (1/phi - 1/s) ds, which is
/// regular at the origin. B is tabulated on knots refined until cubic Hermite
/// interpolation reproduces direct quadrature at every panel midpoint.
class InverseWarpIntegral {
 public:
  InverseWarpIntegral(const MetricProfile& profile, double r_max, double tol = 1e-13);

  double operator()(double r) const { return std::log(r) + regular(r) - regular_at_one_; }
  double regular(double r) const;
  double regular_at_one() const noexcept { return regular_at_one_; }
  std::size_t knot_count() const noexcept { return knots_.size(); }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  double regular_at_one_ = 0.0;
};

/// 1/phi - 1/r, computed as expm1(log r - log phi) / r.
double inverse_warp_excess(const MetricProfile& profile, double r);

/// Lambda_m = |m| int_1^r ds/phi on a grid, so phi_m = exp(Lambda_m).
struct LogMode {
  int m = 0;
  RadialGrid grid;
  Eigen::VectorXd lambda;
  Eigen::VectorXd error;

  Eigen::VectorXd values() const { return lambda.array().exp(); }
};

/// Reduction-of-order factor z with its inner ratio
/// w(s) = (1 / (phi phi_2m)(s)) int_0^s phi phi_2m, so that z' = w.
struct ReductionFactor {
  int m = 0;
  RadialGrid grid;
  Eigen::VectorXd z;
  Eigen::VectorXd w;
  Eigen::VectorXd error;
};

/// psi_m = z phi_m, stored as log psi_m = Lambda_m + log z.
struct BiharmonicMode {
  int m = 0;
  RadialGrid grid;
  Eigen::VectorXd lambda;
  Eigen::VectorXd z;
  Eigen::VectorXd w;
  Eigen::VectorXd log_psi;
  Eigen::VectorXd error;
};

struct ModeResidualReport {
  Eigen::VectorXd harmonic;    // per interior node
  Eigen::VectorXd biharmonic;  // empty for a bare LogMode
  double harmonic_max = 0.0;
  double harmonic_rms = 0.0;
  double biharmonic_max = 0.0;
  double biharmonic_rms = 0.0;
};

/// Mode computations for one profile, sharing the cached A(r) table.
class ModeSolver {
 public:
  ModeSolver(MetricProfile profile, double r_max, ModeOptions options = {});

  const MetricProfile& profile() const noexcept { return profile_; }
  const InverseWarpIntegral& inverse_warp() const noexcept { return inverse_warp_; }

  LogMode harmonic(int m, const RadialGrid& grid) const;
  ReductionFactor reduction(int m, const RadialGrid& grid) const;
  BiharmonicMode biharmonic(int m, const RadialGrid& grid) const;
  /// (1/phi(s)) int_0^s phi, in scaled form.
  double mean_integral_ratio(double s) const;

  /// Lambda_m(r) and z_m(r) at a single radius by direct quadrature.
  struct Point {
    double lambda;
    double z;
  };
  Point point(int m, double r) const;

 private:
  double exponent(int m, double t) const;        // G = log phi + 2|m| A
  double exponent_slope(int m, double t) const;  // G'

  MetricProfile profile_;
  ModeOptions options_;
  InverseWarpIntegral inverse_warp_;
};

LogMode harmonic_log_mode(const MetricProfile& profile, int m, const RadialGrid& grid,
                          const ModeOptions& options = {});
ReductionFactor reduction_factor(const MetricProfile& profile, int m, const RadialGrid& grid,
                                 const ModeOptions& options = {});
BiharmonicMode biharmonic_mode(const MetricProfile& profile, int m, const RadialGrid& grid,
                               const ModeOptions& options = {});
double mean_integral_ratio(const MetricProfile& profile, double s,
                           const ModeOptions& options = {});

/// Scaled residuals over interior nodes:
///   |L_m phi_m| / max(1, phi_m)   and   |L_m psi_m - phi_m| / max(1, phi_m).
ModeResidualReport verify_mode_residuals(const MetricProfile& profile, const LogMode& mode);
ModeResidualReport verify_mode_residuals(const MetricProfile& profile,
                                         const BiharmonicMode& mode);

// ---------------------------------------------------------------------------
// Finite-horizon boundedness

enum class Verdict { bounded, unbounded, undetermined };
const char* to_string(Verdict verdict);

/// Thresholds on the increments of q over the last two doublings R/4 -> R/2 -> R.
struct ConvergenceRule {
  double converge_rel = 1e-6;  // both increments below this times q(R): bounded
  double diverge_rel = 1e-2;   // last increment above this times q(R) ...
  double stay_ratio = 0.95;    // ... and not decaying (ratio to the previous): unbounded
};

Verdict convergence_verdict(double q_quarter, double q_half, double q_full,
                            const ConvergenceRule& rule = {});
/// Same rule for a positive quantity given by its logarithms.
Verdict log_convergence_verdict(double log_quarter, double log_half, double log_full,
                                const ConvergenceRule& rule = {});

}  // namespace warped
