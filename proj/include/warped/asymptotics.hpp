#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "warped/geometry.hpp"
#include "warped/modes.hpp"

namespace warped {

// ---------------------------------------------------------------------------
// Limits and fits

struct LimitEstimate {
  std::vector<double> radii;   // geometric, ending at the horizon
  std::vector<double> values;  // phi'/phi at radii
  double last = 0.0;
  double extrapolated = 0.0;  // Aitken delta-squared on the last three samples
  bool monotone = false;
};

LimitEstimate estimate_log_derivative_limit(const MetricProfile& profile, double horizon,
                                            int samples = 12);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of the mean-integral ratio over log-spaced radii in [lo, hi].
double mean_integral_ratio_slope(const ModeSolver& solver, double lo, double hi,
                                 int samples = 16);

struct TailFit {
  bool classifiable = false;  // false when K >= 0 at some sample
  std::string note;
  // -K ~ c r^p
  double power_exponent = 0.0;
  double power_coefficient = 0.0;
  double power_residual = 0.0;
  // -K ~ c / (r^2 log r), needs the window inside r > 1
  std::optional<double> log_coefficient;
  std::optional<double> log_residual;
  bool log_template_wins = false;
  double residual = 0.0;  // of the winning template
  /// Best-matching class; nullopt when the fit is poor or lands in a gap
  /// between the regimes.
  std::optional<TailDescriptor> descriptor;
};

struct FitOptions {
  int samples = 32;
  double max_residual = 0.05;    // log-log RMS
  double exponent_slack = 0.05;  // |p - 2| tolerance for the quadratic band
};

TailFit fit_tail_exponent(const std::function<double(double)>& curvature, double lo,
                          double hi, const FitOptions& options = {});

// ---------------------------------------------------------------------------
// Numeric evidence

struct ModeEvidence {
  int m = 0;
  Verdict phi_m = Verdict::undetermined;
  Verdict z = Verdict::undetermined;
  double ratio_slope = 0.0;  // log-log slope of w over the last decade
  double lambda_at_horizon = 0.0;
  double z_at_horizon = 0.0;
  double w_max = 0.0;  // largest inner ratio w on the sample grid
};

struct EvidenceOptions {
  int nodes_per_octave = 8;
  double first_radius = 0.01;
  ConvergenceRule rule{};
  ModeOptions modes{};
};

struct NumericEvidence {
  double horizon = 0.0;
  std::vector<ModeEvidence> modes;
  LimitEstimate log_derivative;
  double ratio_slope = 0.0;  // mean-integral ratio over the last decade
  Verdict phi_growth = Verdict::undetermined;  // phi itself at R/4, R/2, R
  bool phi_nondecreasing = false;              // on [horizon / 100, horizon]

  const ModeEvidence* find(int m) const;
};

NumericEvidence numeric_evidence(const MetricProfile& profile, const std::vector<int>& m_set,
                                 double horizon, const EvidenceOptions& options = {});

// ---------------------------------------------------------------------------
// Classification

enum class HarmonicRegime { parabolic, hyperbolic, undetermined };
enum class BiharmonicRegime {
  rigid,
  liouville_to_harmonic,
  admits_nonharmonic_bounded,
  undetermined
};
enum class Route { declared_tail, numeric, both, none };
enum class TailSource { declared, fitted, none };

const char* to_string(HarmonicRegime regime);
const char* to_string(BiharmonicRegime regime);
const char* to_string(Route route);
const char* to_string(TailSource source);

struct ClassifyOptions {
  double horizon = 1e3;
  int m_max = 8;
  EvidenceOptions evidence{};
  FitOptions fit{};
};

struct ClassificationReport {
  HarmonicRegime harmonic = HarmonicRegime::undetermined;
  BiharmonicRegime biharmonic = BiharmonicRegime::undetermined;
  Route route = Route::none;
  bool conflict = false;  // both routes determinate but disagreeing

  HarmonicRegime harmonic_by_tail = HarmonicRegime::undetermined;
  BiharmonicRegime biharmonic_by_tail = BiharmonicRegime::undetermined;
  HarmonicRegime harmonic_by_evidence = HarmonicRegime::undetermined;
  BiharmonicRegime biharmonic_by_evidence = BiharmonicRegime::undetermined;

  TailSource tail_source = TailSource::none;
  std::optional<TailDescriptor> tail;
  std::optional<TailCheck> tail_check;
  std::optional<TailFit> fit;
  NumericEvidence evidence;
  double horizon = 0.0;
};

ClassificationReport classify(const Surface& surface, const ClassifyOptions& options = {});
/// Integrates the metric up to the horizon first.
ClassificationReport classify(const CurvatureProfile& curvature,
                              const ClassifyOptions& options = {});

HarmonicRegime classify_harmonic(const Surface& surface, const ClassifyOptions& options = {});
BiharmonicRegime classify_biharmonic(const Surface& surface,
                                     const ClassifyOptions& options = {});

}  // namespace warped
