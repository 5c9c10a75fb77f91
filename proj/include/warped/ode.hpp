#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include <Eigen/Core>

#include "warped/errors.hpp"

namespace warped {

template <typename Scalar>
struct OdeOptions {
  Scalar rel_tol = Scalar(1e-10);
  Scalar abs_tol = Scalar(1e-12);
  Scalar initial_step = 0;  // 0 selects a step from the local scale
  Scalar max_step = std::numeric_limits<Scalar>::infinity();
  std::size_t max_steps = 50'000'000;
};

template <typename Scalar>
struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  Scalar final_time = 0;
  bool stopped_by_observer = false;
};

/// Adaptive Dormand–Prince 5(4) integration of y' = rhs(t, y) from t0 to t1.
///
/// `observer(t0, y0, dy0, t1, y1, dy1)` runs after every accepted step and may
/// return false to stop. The derivative pairs allow cubic Hermite dense output.
/// Throws IntegrationError on step-size underflow or an exhausted step budget.
template <typename Scalar, int Dim, typename Rhs, typename Observer>
OdeStats<Scalar> integrate_dopri5(Rhs&& rhs, Scalar t0, Eigen::Matrix<Scalar, Dim, 1> y0,
                                  Scalar t1, const OdeOptions<Scalar>& options,
                                  Observer&& observer) {
  using Vec = Eigen::Matrix<Scalar, Dim, 1>;
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;

  constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5,
                   c5 = Scalar(8) / 9;
  constexpr Scalar a21 = Scalar(1) / 5;
  constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                   a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                   a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                   a65 = Scalar(-5103) / 18656;
  constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113, a74 = Scalar(125) / 192,
                   a75 = Scalar(-2187) / 6784, a76 = Scalar(11) / 84;
  constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                   e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;

  const Scalar direction = t1 >= t0 ? Scalar(1) : Scalar(-1);
  OdeStats<Scalar> stats;
  Scalar t = t0;
  Vec y = std::move(y0);
  Vec k1 = rhs(t, y);

  auto error_scale = [&](const Vec& a, const Vec& b) {
    return (options.abs_tol + options.rel_tol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array())
        .matrix();
  };

  Scalar h = options.initial_step;
  if (!(h > 0)) {
    // Hairer–Nørsett–Wanner starting step.
    const Vec sc = error_scale(y, y);
    const Scalar d0 = sqrt((y.array() / sc.array()).square().mean());
    const Scalar d1 = sqrt((k1.array() / sc.array()).square().mean());
    Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1;
    h0 = min(h0, abs(t1 - t0));
    const Vec y1 = y + direction * h0 * k1;
    const Vec k2 = rhs(t + direction * h0, y1);
    const Scalar d2 = sqrt(((k2 - k1).array() / sc.array()).square().mean()) / h0;
    const Scalar dm = max(d1, d2);
    const Scalar h1 = dm <= Scalar(1e-15) ? max(Scalar(1e-6), h0 * Scalar(1e-3))
                                          : pow(Scalar(0.01) / dm, Scalar(0.2));
    h = min(Scalar(100) * h0, h1);
  }
  h = min(h, options.max_step);

  bool last_rejected = false;
  while (direction * (t1 - t) > 0) {
    if (stats.accepted + stats.rejected >= options.max_steps) {
      throw IntegrationError("curvature ODE: step budget exhausted");
    }
    const Scalar remaining = abs(t1 - t);
    bool final_step = false;
    if (h >= remaining) {
      h = remaining;
      final_step = true;
    }
    if (h <= Scalar(16) * std::numeric_limits<Scalar>::epsilon() * max(abs(t), Scalar(1))) {
      throw IntegrationError("dopri5: step size underflow");
    }
    const Scalar s = direction * h;
    const Vec k2 = rhs(t + c2 * s, y + s * (a21 * k1));
    const Vec k3 = rhs(t + c3 * s, y + s * (a31 * k1 + a32 * k2));
    const Vec k4 = rhs(t + c4 * s, y + s * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = rhs(t + c5 * s, y + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Scalar t_new = final_step ? t1 : t + s;
    const Vec k6 =
        rhs(t_new, y + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec y_new = y + s * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vec k7 = rhs(t_new, y_new);
    const Vec err = s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Vec sc = error_scale(y, y_new);
    Scalar err_norm = sqrt((err.array() / sc.array()).square().mean());
    if (!std::isfinite(err_norm)) err_norm = Scalar(1e10);

    if (err_norm <= 1) {
      ++stats.accepted;
      const bool keep_going = observer(t, y, k1, t_new, y_new, k7);
      t = t_new;
      y = y_new;
      k1 = k7;
      if (!keep_going) {
        stats.stopped_by_observer = true;
        break;
      }
      Scalar factor = err_norm == 0 ? Scalar(5) : Scalar(0.9) * pow(err_norm, Scalar(-0.2));
      factor = min(Scalar(5), max(Scalar(0.2), factor));
      if (last_rejected) factor = min(Scalar(1), factor);
      h = min(h * factor, options.max_step);
      last_rejected = false;
    } else {
      ++stats.rejected;
      const Scalar factor = max(Scalar(0.1), Scalar(0.9) * pow(err_norm, Scalar(-0.2)));
      h *= factor;
      last_rejected = true;
    }
  }
  stats.final_time = t;
  return stats;
}

}  // namespace warped
