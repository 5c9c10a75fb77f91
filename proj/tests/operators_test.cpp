#include <cmath>

#include <gtest/gtest.h>

#include "warped/geometry.hpp"
#include "warped/modes.hpp"
#include "warped/operators.hpp"
#include "warped/suites.hpp"

namespace warped {
namespace {

MetricProfile flat() { return builtin_surface("euclidean", {}, 20.0).profile; }

double max_interior_error(const Eigen::VectorXd& v, double target) {
  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i) worst = std::max(worst, std::abs(v[i] - target));
  return worst;
}

TEST(RadialLaplacian, FlatLaplacianOfRSquared) {
  const auto grid = RadialGrid::uniform(0.0, 2.0, 41);
  const Eigen::VectorXd f = grid.nodes().array().square();
  const auto out = radial_laplacian_apply(flat(), 0, RadialFunctionSamples::linear(grid, f));
  for (Eigen::Index i = 0; i < out.values.size(); ++i) EXPECT_NEAR(out.values[i], 4.0, 1e-9) << i;
}

TEST(RadialLaplacian, HarmonicModeTwo) {
  const auto grid = RadialGrid::uniform(0.1, 2.0, 41);
  const Eigen::VectorXd f = grid.nodes().array().square();
  const auto out = radial_laplacian_apply(flat(), 2, RadialFunctionSamples::linear(grid, f));
  EXPECT_LT(max_interior_error(out.values, 0.0), 1e-9);
}

TEST(RadialLaplacian, HyperbolicModeOneIsSecondOrder) {
  const auto p = builtin_surface("hyperbolic", {}, 10.0).profile;
  double previous = 0.0;
  for (int n : {101, 201, 401}) {
    const auto grid = RadialGrid::uniform(0.5, 4.0, n);
    const auto mode = harmonic_log_mode(p, 1, grid);
    const auto out = radial_laplacian_apply(p, 1, RadialFunctionSamples::logarithmic(grid, mode.lambda));
    const double err = max_interior_error(out.values, 0.0);
    if (previous > 0.0) EXPECT_NEAR(previous / err, 4.0, 0.5);
    previous = err;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(RadialLaplacian, Preconditions) {
  const auto grid = RadialGrid::uniform(0.0, 1.0, 11);
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(11);
  EXPECT_THROW(radial_laplacian_apply(flat(), 1, RadialFunctionSamples::linear(grid, f)),
               std::invalid_argument);
  const auto small = RadialGrid::uniform(0.5, 1.0, 4);
  EXPECT_THROW(radial_laplacian_apply(flat(), 0,
                                      RadialFunctionSamples::linear(small, Eigen::VectorXd::Ones(4))),
               std::invalid_argument);
  Eigen::VectorXd bad = f;
  bad[3] = std::nan("");
  EXPECT_THROW(radial_laplacian_apply(flat(), 0, RadialFunctionSamples::linear(grid, bad)),
               std::invalid_argument);
}

TEST(RelativeLaplacian, VanishesOnHarmonicMode) {
  const auto grid = RadialGrid::uniform(1.0, 3.0, 201);
  const Eigen::VectorXd log_f = 3.0 * grid.nodes().array().log();
  // Leading error: 2 g' times the O(h^2) error of g', about 6e-4 at h = 0.01.
  const Eigen::VectorXd rel = relative_radial_laplacian(flat(), 3, grid, log_f);
  EXPECT_LT(max_interior_error(rel, 0.0), 1e-3);
}

RadialFunctionSamples exact_log_samples(const RadialGrid& grid, Eigen::VectorXd log_f,
                                        Eigen::VectorXd slope, Eigen::VectorXd second) {
  auto s = RadialFunctionSamples::logarithmic(grid, std::move(log_f));
  s.log_slope = std::move(slope);
  s.second_ratio = std::move(second);
  return s;
}

TEST(SturmCompare, ReflexiveCasePasses) {
  const auto grid = RadialGrid::uniform(1.0, 5.0, 50);
  const Eigen::VectorXd f = grid.nodes().array().cosh();
  const auto s = RadialFunctionSamples::linear(grid, f);
  const auto report = sturm_compare(s, s, 1.0);
  EXPECT_TRUE(report.hypotheses_hold());
  EXPECT_TRUE(report.conclusion);
  EXPECT_TRUE(report.consistent());
}

TEST(SturmCompare, LogThresholdComparison) {
  // f = x log x with x = r - 1, h = x^2: f''/f = 1 / (x^2 log x) <= 2 / x^2 = h''/h
  // once log x >= 1/2, and f'/f <= h'/h at a once log x >= 1.
  const double a = 4.0;
  const auto grid = RadialGrid::uniform(a, 20.0, 200);
  const Eigen::ArrayXd x = grid.nodes().array() - 1.0;
  const Eigen::ArrayXd lx = x.log();
  const auto f = exact_log_samples(grid, (x.log() + lx.log()).matrix(),
                                   ((lx + 1.0) / (x * lx)).matrix(),
                                   (1.0 / (x.square() * lx)).matrix());
  const auto h = exact_log_samples(grid, (2.0 * lx).matrix(), (2.0 / x).matrix(),
                                   (2.0 / x.square()).matrix());
  const auto report = sturm_compare(f, h, a);
  EXPECT_TRUE(report.hypotheses_hold());
  EXPECT_TRUE(report.conclusion);
  EXPECT_FALSE(report.first_conclusion_violation.has_value());
}

TEST(SturmCompare, SinhAgainstExponentialViolatesHypotheses) {
  const auto grid = RadialGrid::uniform(1.0, 10.0, 100);
  const Eigen::ArrayXd r = grid.nodes().array();
  const Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(r.size());
  const Eigen::ArrayXd log_sinh =
      r + (-(-2.0 * r).exp()).log1p() - std::log(2.0);
  const auto f = exact_log_samples(grid, log_sinh.matrix(), (1.0 / r.tanh()).matrix(),
                                   ones.matrix());
  const auto h = exact_log_samples(grid, r.matrix(), ones.matrix(), ones.matrix());
  const auto report = sturm_compare(f, h, 1.0);
  EXPECT_FALSE(report.initial_slope_ordered);
  EXPECT_TRUE(report.ratio_hypothesis);
  EXPECT_FALSE(report.hypotheses_hold());
  EXPECT_TRUE(report.consistent());
}

TEST(SturmCompare, FiniteDifferencePathOnPowers) {
  const auto grid = RadialGrid::uniform(1.0, 5.0, 400);
  const Eigen::ArrayXd r = grid.nodes().array();
  const auto f = RadialFunctionSamples::linear(grid, r.square().matrix());
  const auto h = RadialFunctionSamples::linear(grid, r.cube().matrix());
  const auto report = sturm_compare(f, h, 1.0);
  EXPECT_TRUE(report.hypotheses_hold());
  EXPECT_TRUE(report.conclusion);
}

TEST(SturmCompare, GridMustStartAtA) {
  const auto grid = RadialGrid::uniform(1.0, 2.0, 10);
  const auto s = RadialFunctionSamples::linear(grid, Eigen::VectorXd::Ones(10));
  EXPECT_THROW(sturm_compare(s, s, 0.5), std::invalid_argument);
}

TEST(SturmCompare, RandomPairProperty) {
  const auto stats = comparison_property(2024, 1000);
  EXPECT_EQ(stats.pairs, 1000);
  EXPECT_EQ(stats.hypotheses_held, 1000);
  EXPECT_EQ(stats.failures, 0);
}

}  // namespace
}  // namespace warped
