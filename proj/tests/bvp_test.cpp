#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "warped/bvp.hpp"
#include "warped/geometry.hpp"
#include "warped/suites.hpp"

namespace warped {
namespace {

using cd = std::complex<double>;

MetricProfile flat(double r_max = 5.0) { return builtin_surface("euclidean", {}, r_max).profile; }
MetricProfile hyperbolic(double r_max = 5.0) {
  return builtin_surface("hyperbolic", {}, r_max).profile;
}

BoundaryTrace constant_trace(double radius, double u, double lap, int n = 64) {
  return BoundaryTrace::from_real(radius, Eigen::VectorXd::Constant(n, u),
                                  Eigen::VectorXd::Constant(n, lap));
}

TEST(AnalyzeTrace, Constant) {
  const auto s = analyze_trace(constant_trace(1.0, 1.0, 0.0), 8);
  for (int m = -8; m <= 8; ++m) {
    EXPECT_NEAR(std::abs(s.alpha_at(m) - cd(m == 0 ? 1.0 : 0.0)), 0.0, 1e-15) << m;
    EXPECT_NEAR(std::abs(s.beta_at(m)), 0.0, 1e-15) << m;
  }
  EXPECT_FALSE(s.aliasing_warning);
}

TEST(AnalyzeTrace, CosineTwoTheta) {
  BoundaryTrace t;
  t.radius = 1.0;
  const Eigen::VectorXd theta = constant_trace(1.0, 0.0, 0.0, 32).theta();
  t.u = (2.0 * theta.array()).cos().cast<cd>();
  t.lap_u = Eigen::VectorXcd::Zero(32);
  const auto s = analyze_trace(t, 4);
  EXPECT_NEAR(std::abs(s.alpha_at(2) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.alpha_at(-2) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.alpha_at(1)), 0.0, 1e-15);
}

TEST(AnalyzeTrace, SynthesisRoundTrip) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const int M = 10;
  Eigen::VectorXcd a(2 * M + 1), b(2 * M + 1);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a[i] = cd(g(rng), g(rng));
    b[i] = cd(g(rng), g(rng));
  }
  BoundaryTrace t{2.0, synthesize_trace(a, M, 64), synthesize_trace(b, M, 64)};
  const auto s = analyze_trace(t, M);
  EXPECT_LT((s.alpha - a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s.beta - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(s.truncation_energy, 1e-24);
}

TEST(AnalyzeTrace, Preconditions) {
  EXPECT_THROW(analyze_trace(constant_trace(1.0, 1.0, 0.0, 48), 4), std::invalid_argument);
  EXPECT_THROW(analyze_trace(constant_trace(1.0, 1.0, 0.0, 16), 8), std::invalid_argument);
  EXPECT_THROW(analyze_trace(constant_trace(-1.0, 1.0, 0.0), 4), std::invalid_argument);
}

TEST(AnalyzeTrace, TruncationIsReported) {
  BoundaryTrace t;
  t.radius = 1.0;
  const Eigen::VectorXd theta = constant_trace(1.0, 0.0, 0.0, 64).theta();
  t.u = (1.0 + 0.1 * (12.0 * theta.array()).cos()).cast<cd>().matrix();
  t.lap_u = Eigen::VectorXcd::Zero(64);
  const auto s = analyze_trace(t, 4);
  EXPECT_GT(s.truncation_energy, 1e-3);
  EXPECT_TRUE(s.aliasing_warning);
  EXPECT_NEAR(s.discarded_rms, 0.1 / std::sqrt(2.0), 1e-12);
}

TEST(SolveDisk, ConstantSolution) {
  const auto coeffs = solve_disk_biharmonic(flat(), 1.0, analyze_trace(constant_trace(1.0, 1.0, 0.0), 4));
  EXPECT_NEAR(std::abs(coeffs.at(0).c_value() - 1.0), 0.0, 1e-14);
  for (int m = -4; m <= 4; ++m) EXPECT_EQ(std::abs(coeffs.at(m).d_value()), 0.0) << m;
  for (double r : {0.0, 0.3, 1.0}) {
    EXPECT_NEAR(std::abs(evaluate_solution(flat(), coeffs, r, 0.7).value - 1.0), 0.0, 1e-14);
  }
  const auto report = verify_disk_solution(flat(), coeffs, RadialGrid::uniform(0.1, 1.0, 20));
  EXPECT_LT(report.interior_max, 1e-12);
}

TEST(SolveDisk, QuarterRSquared) {
  const auto coeffs =
      solve_disk_biharmonic(flat(), 1.0, analyze_trace(constant_trace(1.0, 0.25, 1.0), 4));
  EXPECT_NEAR(std::abs(coeffs.at(0).d_value() - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(coeffs.at(0).c_value()), 0.0, 1e-12);
  for (double r : {0.0, 0.2, 0.55, 1.0}) {
    const auto v = evaluate_solution(flat(), coeffs, r, 2.0);
    EXPECT_NEAR(v.value.real(), r * r / 4.0, 1e-12) << r;
  }
  const auto trace = constant_trace(1.0, 0.25, 1.0);
  const auto report =
      verify_disk_solution(flat(), coeffs, RadialGrid::uniform(0.1, 1.0, 40), &trace);
  EXPECT_LT(report.interior_max, 1e-10);
  EXPECT_LT(*report.boundary_error, 1e-14);
  EXPECT_LT(*report.boundary_lap_error, 1e-14);
}

TEST(SolveDisk, KnownCoefficientsOnFlatDisk) {
  // u = 2 (0.3 r + 0.5 r^3 / 8) cos(theta): c = 0.3 and d = 0.5 at m = +-1, where
  // phi_1 = r and psi_1 = r^3 / 8.
  const double R = 2.0;
  const int M = 3;
  Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(2 * M + 1), beta = alpha;
  for (int m : {-1, 1}) {
    alpha[m + M] = 0.3 * R + 0.5 * R * R * R / 8.0;
    beta[m + M] = 0.5 * R;
  }
  BoundaryTrace t{R, synthesize_trace(alpha, M, 32), synthesize_trace(beta, M, 32)};
  const auto coeffs = solve_disk_biharmonic(flat(), R, analyze_trace(t, M));
  for (int m : {-1, 1}) {
    EXPECT_NEAR(std::abs(coeffs.at(m).c_value() - 0.3), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(coeffs.at(m).d_value() - 0.5), 0.0, 1e-10);
  }
}

TEST(SolveDisk, LinearInTheTrace) {
  const auto p = hyperbolic();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const int M = 4;
  auto random = [&] {
    Eigen::VectorXcd v(2 * M + 1);
    for (auto& x : v) x = cd(g(rng), g(rng));
    return v;
  };
  const Eigen::VectorXcd a1 = random(), b1 = random(), a2 = random(), b2 = random();
  auto solve = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    BoundaryTrace t{1.5, synthesize_trace(a, M, 16), synthesize_trace(b, M, 16)};
    return solve_disk_biharmonic(p, 1.5, analyze_trace(t, M));
  };
  const auto s1 = solve(a1, b1), s2 = solve(a2, b2);
  const auto sum = solve(a1 + 2.0 * a2, b1 + 2.0 * b2);
  for (int m = -M; m <= M; ++m) {
    EXPECT_NEAR(std::abs(sum.at(m).c_value() - (s1.at(m).c_value() + 2.0 * s2.at(m).c_value())),
                0.0, 1e-10);
    EXPECT_NEAR(std::abs(sum.at(m).d_value() - (s1.at(m).d_value() + 2.0 * s2.at(m).d_value())),
                0.0, 1e-10);
  }
}

TEST(SolveDisk, HarmonicTraceGivesHarmonicSolution) {
  // beta = 0 forces every d_m = 0.
  const int M = 4;
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(2 * M + 1);
  a[M + 3] = cd(0.2, -1.0);
  a[M - 2] = cd(1.5, 0.0);
  BoundaryTrace t{2.0, synthesize_trace(a, M, 16), Eigen::VectorXcd::Zero(16)};
  const auto coeffs = solve_disk_biharmonic(hyperbolic(), 2.0, analyze_trace(t, M));
  for (int m = -M; m <= M; ++m) EXPECT_EQ(std::abs(coeffs.at(m).d_value()), 0.0) << m;
}

TEST(EvaluateSolution, RefusesPointsOutsideDisk) {
  const auto coeffs = solve_disk_biharmonic(flat(), 1.0, analyze_trace(constant_trace(1.0, 1.0, 0.0), 2));
  EXPECT_THROW(evaluate_solution(flat(), coeffs, 1.5, 0.0), std::exception);
  EXPECT_THROW(evaluate_solution(flat(), coeffs, -0.1, 0.0), std::exception);
}

TEST(RoundTrip, HyperbolicRandomCoefficients) {
  const auto stats = bvp_round_trip(hyperbolic(), 3.0, 17, 4);
  EXPECT_LT(stats.coefficient_error, 1e-6);
  EXPECT_LT(stats.boundary_error, 1e-8);
  EXPECT_LT(stats.interior_error, 1e-5);
}

TEST(SolveDisk, LargeRadiusStaysFinite) {
  const auto p = builtin_surface("power-curvature", {}, 20.0).profile;
  BoundaryTrace t = constant_trace(20.0, 1.0, 1.0, 16);
  const auto coeffs = solve_disk_biharmonic(p, 20.0, analyze_trace(t, 2));
  EXPECT_TRUE(std::isfinite(coeffs.at(0).z_R));
  const auto v = evaluate_solution(p, coeffs, 20.0, 0.0);
  EXPECT_NEAR(v.value.real(), 1.0, 1e-8);
}

}  // namespace
}  // namespace warped
