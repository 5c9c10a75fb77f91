#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "warped/asymptotics.hpp"
#include "warped/geometry.hpp"

namespace warped {

/// Outcome of one invariant suite. Details are fixed-format text lines, so two
/// runs with the same inputs print the same bytes.
struct SuiteResult {
  std::string name;
  bool passed = false;
  std::vector<std::string> details;
};

// ---------------------------------------------------------------------------
// Residual convergence of the mode equations under uniform grid refinement.

struct ConvergenceStudyOptions {
  double first = 0.5;
  double last = 2.5;
  double step = 0.02;  // halved at each level
  int levels = 3;
  int m_max = 4;
  double ratio_lo = 3.5;
  double ratio_hi = 4.5;
  // A finer-level residual below this is rounding, not discretization error.
  double rounding_floor = 1e-9;
};

struct ConvergenceRow {
  int m = 0;
  bool biharmonic = false;        // psi equation rather than phi
  std::vector<double> residual;   // max scaled residual per level
  std::vector<double> ratio;      // residual[k] / residual[k + 1]
  bool passed = false;
};

std::vector<ConvergenceRow> residual_convergence(const MetricProfile& profile,
                                                 const ConvergenceStudyOptions& options = {});

// ---------------------------------------------------------------------------
// Comparison lemma on random Riccati pairs.

struct ComparisonStats {
  int pairs = 0;
  int hypotheses_held = 0;
  int failures = 0;  // hypotheses held but the conclusion failed at some node
  double worst_margin = 0.0;  // max over nodes of f'/f - h'/h, relative
};

/// Pairs f'' = q_f f and h'' = q_h h on [0, 4] with q_f <= q_h and ordered
/// initial log-derivatives, integrated in Riccati form.
ComparisonStats comparison_property(std::uint64_t seed, int pairs = 1000);

// ---------------------------------------------------------------------------
// BVP round trip from random coefficients.

struct RoundTripStats {
  double radius = 0.0;
  double coefficient_error = 0.0;  // max relative error over c_m and d_m
  double boundary_error = 0.0;
  double interior_error = 0.0;     // max relative error at random points
};

RoundTripStats bvp_round_trip(const MetricProfile& profile, double radius, std::uint64_t seed,
                              int M = 8, int points = 100);

// ---------------------------------------------------------------------------
// Suites as run by `verify`.

SuiteResult stencil_suite(const MetricProfile& profile);
SuiteResult comparison_suite(std::uint64_t seed, int pairs = 1000);
SuiteResult round_trip_suite(const MetricProfile& profile, const std::vector<double>& radii,
                             std::uint64_t seed);
SuiteResult regime_evidence_suite(const Surface& surface, const ClassifyOptions& options);

/// Uniform double in [0, 1) from a 64-bit engine, identical on every platform.
double unit_uniform(std::uint64_t bits);

}  // namespace warped
