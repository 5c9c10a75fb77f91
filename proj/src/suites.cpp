#include "warped/suites.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <fmt/core.h>

#include "warped/bvp.hpp"
#include "warped/modes.hpp"
#include "warped/ode.hpp"
#include "warped/operators.hpp"

namespace warped {

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()(double lo, double hi) { return lo + (hi - lo) * unit_uniform(engine_()); }

 private:
  std::mt19937_64 engine_;
};

std::string join_levels(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += fmt::format("{}{:.3e}", i ? " " : "", v[i]);
  }
  return out;
}

std::string join_ratios(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += i ? " " : "";
    out += std::isnan(v[i]) ? std::string("rounding") : fmt::format("{:.3f}", v[i]);
  }
  return out;
}

// Riccati form of f'' = q f: (log f)' = y, y' = q - y^2.
template <typename Q>
RadialFunctionSamples riccati_samples(const RadialGrid& grid, Q q, double y0) {
  const Eigen::Index n = grid.size();
  Eigen::VectorXd log_f(n), slope(n), second(n);
  Eigen::Vector2d y(0.0, y0);
  OdeOptions<double> options;
  options.rel_tol = 1e-12;
  options.abs_tol = 1e-14;
  auto rhs = [&q](double r, const Eigen::Vector2d& s) {
    return Eigen::Vector2d(s[1], q(r) - s[1] * s[1]);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) {
      integrate_dopri5<double, 2>(rhs, grid[i - 1], y, grid[i], options,
                                  [&y](double, const Eigen::Vector2d&, const Eigen::Vector2d&,
                                       double, const Eigen::Vector2d& y1,
                                       const Eigen::Vector2d&) {
                                    y = y1;
                                    return true;
                                  });
    }
    log_f[i] = y[0];
    slope[i] = y[1];
    second[i] = q(grid[i]);
  }
  auto s = RadialFunctionSamples::logarithmic(grid, log_f);
  s.log_slope = slope;
  s.second_ratio = second;
  return s;
}

}  // namespace

std::vector<ConvergenceRow> residual_convergence(const MetricProfile& profile,
                                                 const ConvergenceStudyOptions& options) {
  const double last = std::min(options.last, profile.r_max());
  ModeSolver solver(profile, last);
  std::vector<ConvergenceRow> rows;
  for (int m = 0; m <= options.m_max; ++m) {
    ConvergenceRow harmonic{m, false, {}, {}, true};
    ConvergenceRow biharmonic{m, true, {}, {}, true};
    double h = options.step;
    for (int level = 0; level < options.levels; ++level, h *= 0.5) {
      const auto count = static_cast<Eigen::Index>(std::lround((last - options.first) / h)) + 1;
      const RadialGrid grid = RadialGrid::uniform(options.first, last, count);
      const auto rep = verify_mode_residuals(profile, solver.biharmonic(m, grid));
      harmonic.residual.push_back(rep.harmonic_max);
      biharmonic.residual.push_back(rep.biharmonic_max);
    }
    for (ConvergenceRow* row : {&harmonic, &biharmonic}) {
      for (std::size_t k = 0; k + 1 < row->residual.size(); ++k) {
        const double coarse = row->residual[k];
        const double fine = row->residual[k + 1];
        if (fine <= options.rounding_floor) {
          row->ratio.push_back(std::nan(""));
          continue;
        }
        const double ratio = coarse / fine;
        row->ratio.push_back(ratio);
        row->passed = row->passed && ratio >= options.ratio_lo && ratio <= options.ratio_hi;
      }
      rows.push_back(*row);
    }
  }
  return rows;
}

ComparisonStats comparison_property(std::uint64_t seed, int pairs) {
  Uniform rand(seed);
  const RadialGrid grid = RadialGrid::uniform(0.0, 4.0, 81);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  SturmOptions sturm;
  ComparisonStats stats;
  stats.worst_margin = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < pairs; ++p) {
    // q_f >= 0.3 and y_f(0) >= -0.5 keep y_f above -0.5, so f never vanishes.
    const double c0 = rand(0.3, 4.0);
    const double c1 = rand(0.0, c0 - 0.3);
    const double k1 = rand(0.5, 4.0);
    const double p1 = rand(0.0, kTwoPi);
    const bool equal_q = rand(0.0, 1.0) < 0.25;
    const double d0 = equal_q ? 0.0 : rand(0.0, 2.0);
    const double d1 = equal_q ? 0.0 : rand(0.0, 2.0);
    const double k2 = rand(0.5, 4.0);
    const double p2 = rand(0.0, kTwoPi);
    const double yf0 = rand(-0.5, 3.0);
    const double yh0 = yf0 + (rand(0.0, 1.0) < 0.25 ? 0.0 : rand(0.0, 1.0));

    auto qf = [=](double r) { return c0 + c1 * std::sin(k1 * r + p1); };
    auto qh = [=](double r) { return qf(r) + d0 + 0.5 * d1 * (1.0 + std::sin(k2 * r + p2)); };
    const auto f = riccati_samples(grid, qf, yf0);
    const auto h = riccati_samples(grid, qh, yh0);
    const SturmReport rep = sturm_compare(f, h, 0.0, sturm);

    ++stats.pairs;
    if (rep.hypotheses_hold()) {
      ++stats.hypotheses_held;
      if (!rep.conclusion) ++stats.failures;
    }
    for (Eigen::Index i = 1; i < grid.size(); ++i) {
      const double a = (*f.log_slope)[i];
      const double b = (*h.log_slope)[i];
      stats.worst_margin =
          std::max(stats.worst_margin, (a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
    }
  }
  return stats;
}

RoundTripStats bvp_round_trip(const MetricProfile& profile, double radius, std::uint64_t seed,
                              int M, int points) {
  Uniform rand(seed);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const ModeSolver reference(profile, radius);
  const auto size = static_cast<Eigen::Index>(2 * M + 1);
  Eigen::VectorXcd c(size), d(size), alpha(size), beta(size);
  for (int m = -M; m <= M; ++m) {
    const Eigen::Index k = m + M;
    c[k] = std::polar(rand(0.5, 1.5), rand(0.0, kTwoPi));
    d[k] = std::polar(rand(0.5, 1.5), rand(0.0, kTwoPi));
    const auto p = reference.point(m, radius);
    const double phi = std::exp(p.lambda);
    alpha[k] = c[k] * phi + d[k] * phi * p.z;
    beta[k] = d[k] * phi;
  }
  Eigen::Index samples = 4;
  while (samples < 2 * M + 2) samples *= 2;
  samples *= 2;
  const BoundaryTrace trace{radius, synthesize_trace(alpha, M, samples),
                            synthesize_trace(beta, M, samples)};
  const ModeCoefficients coeffs = solve_disk_biharmonic(profile, radius, analyze_trace(trace, M));

  RoundTripStats stats;
  stats.radius = radius;
  for (int m = -M; m <= M; ++m) {
    const Eigen::Index k = m + M;
    stats.coefficient_error =
        std::max({stats.coefficient_error, std::abs(coeffs.at(m).c_value() - c[k]) / std::abs(c[k]),
                  std::abs(coeffs.at(m).d_value() - d[k]) / std::abs(d[k])});
  }
  const auto residual = verify_disk_solution(
      profile, coeffs, RadialGrid::uniform(0.1 * radius, radius, 11), &trace);
  stats.boundary_error = std::max(*residual.boundary_error, *residual.boundary_lap_error);

  // Interior oracle: modes solved directly on the sorted sample radii.
  std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(points));
  for (auto& [r, theta] : pts) {
    r = radius * (1.0 - rand(0.0, 1.0));
    theta = rand(0.0, kTwoPi);
  }
  std::sort(pts.begin(), pts.end());
  Eigen::VectorXd radii(points);
  for (int i = 0; i < points; ++i) radii[i] = pts[static_cast<std::size_t>(i)].first;
  const RadialGrid grid = RadialGrid::from_nodes(radii);
  std::vector<BiharmonicMode> modes;
  for (int m = 0; m <= M; ++m) modes.push_back(reference.biharmonic(m, grid));
  for (int i = 0; i < points; ++i) {
    const auto [r, theta] = pts[static_cast<std::size_t>(i)];
    std::complex<double> exact = 0.0;
    for (int m = -M; m <= M; ++m) {
      const BiharmonicMode& b = modes[static_cast<std::size_t>(std::abs(m))];
      const double phi = std::exp(b.lambda[i]);
      exact += (c[m + M] + d[m + M] * b.z[i]) * phi * std::polar(1.0, m * theta);
    }
    const auto value = evaluate_solution(profile, coeffs, r, theta).value;
    stats.interior_error =
        std::max(stats.interior_error, std::abs(value - exact) / std::max(1.0, std::abs(exact)));
  }
  return stats;
}

SuiteResult stencil_suite(const MetricProfile& profile) {
  SuiteResult out{"stencil", true, {}};
  constexpr double kStep = 1e-3;
  constexpr double kLimit = 1e-4;
  const double last = std::min(2.5, profile.r_max() - 2.0 * kStep);
  const auto dc =
      check_derivative_consistency(profile, RadialGrid::uniform(0.5, last, 41), kStep);
  const bool consistent = dc.max_phi_prime_error <= kLimit && dc.max_phi_second_error <= kLimit;
  out.passed = consistent;
  out.details.push_back(fmt::format("derivative consistency h={:.0e}: phi' {:.3e}, phi'' {:.3e} "
                                    "(limit {:.0e}) {}",
                                    kStep, dc.max_phi_prime_error, dc.max_phi_second_error,
                                    kLimit, consistent ? "ok" : "FAIL"));
  for (const auto& row : residual_convergence(profile)) {
    out.passed = out.passed && row.passed;
    out.details.push_back(fmt::format("m={} {} residual [{}] ratios [{}] {}", row.m,
                                      row.biharmonic ? "psi" : "phi", join_levels(row.residual),
                                      join_ratios(row.ratio), row.passed ? "ok" : "FAIL"));
  }
  return out;
}

SuiteResult comparison_suite(std::uint64_t seed, int pairs) {
  const auto stats = comparison_property(seed, pairs);
  SuiteResult out{"comparison", stats.failures == 0, {}};
  out.details.push_back(fmt::format("pairs {}, hypotheses held {}, failures {}, worst margin {:.3e}",
                                    stats.pairs, stats.hypotheses_held, stats.failures,
                                    stats.worst_margin));
  return out;
}

SuiteResult round_trip_suite(const MetricProfile& profile, const std::vector<double>& radii,
                             std::uint64_t seed) {
  SuiteResult out{"round-trip", true, {}};
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto s = bvp_round_trip(profile, radii[i], seed + i);
    const bool ok = s.coefficient_error <= 1e-6 && s.boundary_error <= 1e-8 &&
                    s.interior_error <= 1e-5;
    out.passed = out.passed && ok;
    out.details.push_back(fmt::format("R={:g}: coefficients {:.3e}, boundary {:.3e}, interior "
                                      "{:.3e} {}",
                                      s.radius, s.coefficient_error, s.boundary_error,
                                      s.interior_error, ok ? "ok" : "FAIL"));
  }
  return out;
}

SuiteResult regime_evidence_suite(const Surface& surface, const ClassifyOptions& options) {
  const auto rep = classify(surface, options);
  const bool determinate = rep.harmonic != HarmonicRegime::undetermined ||
                           rep.biharmonic != BiharmonicRegime::undetermined;
  SuiteResult out{"regime-evidence", determinate && !rep.conflict, {}};
  out.details.push_back(fmt::format("harmonic {}, biharmonic {}, route {}, conflict {}",
                                    to_string(rep.harmonic), to_string(rep.biharmonic),
                                    to_string(rep.route), rep.conflict ? "yes" : "no"));
  out.details.push_back(fmt::format("tail route: {} / {}; numeric route: {} / {}",
                                    to_string(rep.harmonic_by_tail),
                                    to_string(rep.biharmonic_by_tail),
                                    to_string(rep.harmonic_by_evidence),
                                    to_string(rep.biharmonic_by_evidence)));
  return out;
}

}  // namespace warped
