#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "warped/grid.hpp"
#include "warped/interpolation.hpp"
#include "warped/ode.hpp"
#include "warped/parallel.hpp"
#include "warped/quadrature.hpp"
#include "warped/stencil.hpp"

namespace warped {
namespace {

TEST(RadialGrid, RejectsUnsortedAndShortInput) {
  EXPECT_THROW(RadialGrid::uniform(0.0, 1.0, 2), std::invalid_argument);
  EXPECT_THROW(RadialGrid::geometric(0.0, 1.0, 10), std::invalid_argument);
  Eigen::VectorXd bad(3);
  bad << 0.0, 0.5, 0.5;
  EXPECT_THROW(RadialGrid::from_nodes(bad), std::invalid_argument);
}

TEST(RadialGrid, PanelLookupClampsToEnds) {
  const auto g = RadialGrid::uniform(0.0, 1.0, 11);
  EXPECT_EQ(g.panel_of(-1.0), 0);
  EXPECT_EQ(g.panel_of(0.35), 3);
  EXPECT_EQ(g.panel_of(2.0), 9);
  EXPECT_EQ(g.spacing(), Spacing::uniform);
}

TEST(DerivativeStencil, ExactOnQuadraticsOverIrregularNodes) {
  Eigen::VectorXd nodes(7);
  nodes << 0.1, 0.15, 0.3, 0.32, 0.6, 0.9, 1.4;
  const auto grid = RadialGrid::from_nodes(nodes);
  const DerivativeStencil stencil(grid);
  const Eigen::VectorXd f = (3.0 * nodes.array().square() - nodes.array() + 2.0).matrix();
  const Eigen::VectorXd d1 = stencil.first(f);
  const Eigen::VectorXd d2 = stencil.second(f);
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    EXPECT_NEAR(d1[i], 6.0 * nodes[i] - 1.0, 1e-10) << "node " << i;
    EXPECT_NEAR(d2[i], 6.0, 1e-8) << "node " << i;
  }
}

TEST(DerivativeStencil, SecondOrderOnUniformGrid) {
  double previous = 0.0;
  for (int n : {21, 41, 81}) {
    const auto grid = RadialGrid::uniform(0.0, 1.0, n);
    const Eigen::VectorXd f = grid.nodes().array().sin();
    const Eigen::VectorXd d2 = DerivativeStencil(grid).second(f);
    const double err = (d2 + f).cwiseAbs().maxCoeff();
    if (previous > 0.0) EXPECT_GT(previous / err, 3.0);
    previous = err;
  }
}

TEST(Quadrature, GaussKronrodPolynomialAndSmooth) {
  const auto cubic = integrate_adaptive([](double x) { return x * x * x; }, 0.0, 2.0);
  EXPECT_NEAR(cubic.value, 4.0, 1e-14);
  const auto s = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.value, 2.0, 1e-12);
}

TEST(Quadrature, GradedResolvesNarrowBoundaryLayer) {
  // e^{1000 (x - 1)} on [0, 1]: all mass sits within 1e-2 of the right end.
  const auto r = integrate_graded([](double x) { return std::exp(1000.0 * (x - 1.0)); }, 0.0,
                                  1.0, 0.0, 1e-3);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, -std::expm1(-1000.0) / 1000.0, 1e-15);
}

TEST(Dopri5, ExponentialGrowth) {
  using Vec = Eigen::Matrix<double, 1, 1>;
  OdeOptions<double> opts;
  double final_value = 0.0;
  integrate_dopri5(
      [](double, const Vec& y) { return Vec(y); }, 0.0, Vec(1.0), 3.0, opts,
      [&](double, const Vec&, const Vec&, double, const Vec& y1, const Vec&) {
        final_value = y1[0];
        return true;
      });
  EXPECT_NEAR(final_value / std::exp(3.0), 1.0, 1e-9);
}

TEST(Dopri5, ObserverCanStop) {
  using Vec = Eigen::Matrix<double, 1, 1>;
  const auto stats = integrate_dopri5(
      [](double, const Vec&) { return Vec(1.0); }, 0.0, Vec(0.0), 10.0, OdeOptions<double>{},
      [](double, const Vec&, const Vec&, double, const Vec& y1, const Vec&) {
        return y1[0] < 1.0;
      });
  EXPECT_TRUE(stats.stopped_by_observer);
}

TEST(Hermite, QuinticReproducesQuintics) {
  auto p = [](double x) { return x * x * x * x * x - 2.0 * x * x + 1.0; };
  auto dp = [](double x) { return 5.0 * x * x * x * x - 4.0 * x; };
  auto d2p = [](double x) { return 20.0 * x * x * x - 4.0; };
  const double a = 0.3, b = 1.1;
  for (double x : {0.3, 0.5, 0.77, 1.1}) {
    EXPECT_NEAR(hermite_quintic(a, p(a), dp(a), d2p(a), b, p(b), dp(b), d2p(b), x), p(x), 1e-13);
  }
}

TEST(MonotoneCubic, PreservesMonotoneData) {
  Eigen::VectorXd nodes(6), values(6);
  nodes << 0.0, 1.0, 2.0, 3.0, 4.0, 5.0;
  values << 0.0, 0.0, 0.1, 5.0, 5.0, 5.1;
  const MonotoneCubic interp(RadialGrid::from_nodes(nodes), values);
  double last = interp(0.0);
  for (int i = 1; i <= 500; ++i) {
    const double v = interp(0.01 * i);
    EXPECT_GE(v, last - 1e-15);
    last = v;
  }
  EXPECT_DOUBLE_EQ(interp(3.0), 5.0);
}

TEST(NaturalCubicSpline, ReproducesLinearData) {
  Eigen::VectorXd x(4), y(4);
  x << 0.0, 1.0, 2.5, 4.0;
  y = 2.0 * x.array() - 1.0;
  const NaturalCubicSpline s(x, y);
  EXPECT_NEAR(s(1.7), 2.4, 1e-14);
}

TEST(ParallelFor, EveryIndexOnceAndLowestErrorWins) {
  std::vector<int> hits(257, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);

  try {
    parallel_for(64, [](std::size_t i) {
      if (i == 7 || i == 40) throw std::runtime_error(std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

}  // namespace
}  // namespace warped
