#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "warped/geometry.hpp"
#include "warped/grid.hpp"
#include "warped/interpolation.hpp"
#include "warped/modes.hpp"

namespace warped {

/// Samples of u and Delta u on the circle r = R at theta_k = 2 pi k / N.
struct BoundaryTrace {
  double radius = 1.0;
  Eigen::VectorXcd u;
  Eigen::VectorXcd lap_u;

  static BoundaryTrace from_real(double radius, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& lap_u);
  Eigen::Index size() const { return u.size(); }
  Eigen::VectorXd theta() const;
  /// N a power of two >= 4, equal lengths, finite samples, R > 0.
  void validate() const;
};

/// Boundary coefficients alpha_m (of u) and beta_m (of Delta u), |m| <= M.
struct FourierSpectrum {
  int M = 0;
  Eigen::VectorXcd alpha;  // index m + M
  Eigen::VectorXcd beta;
  double radius = 1.0;
  /// Energy of the discarded coefficients relative to the total (worst of u, Delta u).
  double truncation_energy = 0.0;
  double discarded_rms = 0.0;  // rms of the discarded part of u on the circle
  bool aliasing_warning = false;

  std::complex<double> alpha_at(int m) const { return alpha[m + M]; }
  std::complex<double> beta_at(int m) const { return beta[m + M]; }
};

constexpr double kAliasingThreshold = 1e-8;

/// Needs N >= 2M + 2.
FourierSpectrum analyze_trace(const BoundaryTrace& trace, int M);

/// Values of sum_{|m|<=M} a_m e^{i m theta} at N equispaced angles.
Eigen::VectorXcd synthesize_trace(const Eigen::VectorXcd& coefficients, int M, Eigen::Index n);

/// Complex number held as log-magnitude and phase; zero has log_abs = -inf.
struct LogComplex {
  double log_abs = -std::numeric_limits<double>::infinity();
  double phase = 0.0;

  static LogComplex from(std::complex<double> z);
  std::complex<double> value() const { return std::polar(std::exp(log_abs), phase); }
  /// value() * e^{log_factor}, without forming value().
  std::complex<double> scaled(double log_factor) const {
    return std::polar(std::exp(log_abs + log_factor), phase);
  }
};

struct ModeCoefficient {
  int m = 0;
  LogComplex c;
  LogComplex d;
  double lambda_R = 0.0;  // Lambda_m(R)
  double z_R = 0.0;       // psi_m(R) / phi_m(R), the conditioning of the solve
  bool log_form = false;  // |Lambda_m(R)| above the log-arithmetic switch
  bool c_underflow = false;
  bool d_underflow = false;
  // c_m phi_m(R) = alpha_m - beta_m z(R) and d_m phi_m(R) = beta_m, which stay
  // well scaled when phi_m(R) does not.
  std::complex<double> c_scaled;
  std::complex<double> beta;

  std::complex<double> c_value() const { return c.value(); }
  std::complex<double> d_value() const { return d.value(); }
};

struct DiskOptions {
  Eigen::Index grid_nodes = 257;  // uniform radial table on [0, R]
  double log_switch = 500.0;
  ModeOptions modes{};
};

/// Coefficients of u = sum (c_m phi_m + d_m psi_m) e^{i m theta} on B_R, with
/// the radial tables used for interior evaluation.
struct ModeCoefficients {
  double radius = 1.0;
  int M = 0;
  std::vector<ModeCoefficient> modes;  // index m + M
  double truncation_energy = 0.0;
  double discarded_rms = 0.0;
  RadialGrid grid = RadialGrid::uniform(0.0, 1.0, 3);
  // Monotone Hermite interpolants over `grid` of Lambda_m - |m| log r and of z,
  // index |m|.
  std::vector<MonotoneCubic> regular_lambda;
  std::vector<MonotoneCubic> z;

  const ModeCoefficient& at(int m) const { return modes.at(static_cast<std::size_t>(m + M)); }
};

ModeCoefficients solve_disk_biharmonic(const MetricProfile& profile, double radius,
                                       const FourierSpectrum& spectrum,
                                       const DiskOptions& options = {});

struct SolutionValue {
  std::complex<double> value;
  double truncation_estimate = 0.0;  // rms size of the discarded boundary modes
};

/// Partial sum over |m| <= M at (r, theta); refuses r outside [0, R].
SolutionValue evaluate_solution(const MetricProfile& profile, const ModeCoefficients& coeffs,
                                double r, double theta);

struct DiskResidualReport {
  std::vector<double> mode_residual;  // index m + M, max over interior nodes
  double interior_max = 0.0;
  std::optional<double> boundary_error;      // u, relative to max(1, max |u|)
  std::optional<double> boundary_lap_error;  // Delta u, relative to max(1, max |Delta u|)
};

/// Per-mode check L_m(c_m phi_m + d_m psi_m) = d_m phi_m on `grid` (inside
/// (0, R]), residuals scaled by max(1, max |c_m phi_m + d_m psi_m|). With a
/// trace, the boundary values are re-synthesised and compared against it.
DiskResidualReport verify_disk_solution(const MetricProfile& profile,
                                        const ModeCoefficients& coeffs, const RadialGrid& grid,
                                        const BoundaryTrace* trace = nullptr,
                                        const ModeOptions& options = {});

}  // namespace warped
