#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace warped {

template <typename Scalar>
struct QuadratureOptions {
  Scalar abs_tol = Scalar(1e-300);
  Scalar rel_tol = Scalar(1e-12);
  std::size_t max_intervals = 4000;
};

template <typename Scalar>
struct QuadratureResult {
  Scalar value = 0;
  Scalar error = 0;
  std::size_t evaluations = 0;
  bool converged = true;
  // Interval carrying the largest error estimate at exit.
  Scalar worst_lower = 0;
  Scalar worst_upper = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar>
struct Panel {
  Scalar lower, upper, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename Scalar, typename F>
Panel<Scalar> kronrod15(F& f, Scalar a, Scalar b) {
  using std::abs;
  using std::pow;
  const Scalar center = Scalar(0.5) * (a + b);
  const Scalar half = Scalar(0.5) * (b - a);
  const Scalar fc = f(center);
  Scalar kronrod = fc * Scalar(kKronrodWeights[7]);
  Scalar gauss = fc * Scalar(kGaussWeights[3]);
  Scalar abs_sum = abs(kronrod);
  std::array<Scalar, 7> lo{}, hi{};
  for (int j = 0; j < 7; ++j) {
    const Scalar dx = half * Scalar(kKronrodNodes[j]);
    lo[j] = f(center - dx);
    hi[j] = f(center + dx);
    kronrod += Scalar(kKronrodWeights[j]) * (lo[j] + hi[j]);
    abs_sum += Scalar(kKronrodWeights[j]) * (abs(lo[j]) + abs(hi[j]));
    if (j % 2 == 1) gauss += Scalar(kGaussWeights[j / 2]) * (lo[j] + hi[j]);
  }
  const Scalar mean = kronrod * Scalar(0.5);
  Scalar asc = Scalar(kKronrodWeights[7]) * abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += Scalar(kKronrodWeights[j]) * (abs(lo[j] - mean) + abs(hi[j] - mean));
  }
  const Scalar result = kronrod * half;
  const Scalar resabs = abs_sum * abs(half);
  const Scalar resasc = asc * abs(half);
  Scalar error = abs((kronrod - gauss) * half);
  if (resasc != Scalar(0) && error != Scalar(0)) {
    error = resasc * std::min(Scalar(1), pow(Scalar(200) * error / resasc, Scalar(1.5)));
  }
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  if (resabs > std::numeric_limits<Scalar>::min() / (Scalar(50) * eps)) {
    error = std::max(Scalar(50) * eps * resabs, error);
  }
  return {a, b, result, error};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod quadrature of f over [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol * |I|). Panels narrower than a few ulps
/// are frozen. Never throws; callers inspect `converged`.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, Scalar a, Scalar b,
                                            const QuadratureOptions<Scalar>& options = {}) {
  using std::abs;
  QuadratureResult<Scalar> out;
  if (a == b) return out;

  std::priority_queue<detail::Panel<Scalar>> active;
  Scalar frozen_value = 0;
  Scalar frozen_error = 0;
  auto first = detail::kronrod15<Scalar>(f, a, b);
  out.evaluations = 15;
  Scalar value = first.value;
  Scalar error = first.error;
  active.push(first);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  auto tolerance = [&](Scalar v) { return std::max(options.abs_tol, options.rel_tol * abs(v)); };

  std::size_t intervals = 1;
  while (error > tolerance(value) && !active.empty()) {
    if (intervals >= options.max_intervals) {
      out.converged = false;
      break;
    }
    const auto worst = active.top();
    active.pop();
    const Scalar mid = Scalar(0.5) * (worst.lower + worst.upper);
    const Scalar width = abs(worst.upper - worst.lower);
    if (width <= Scalar(64) * eps * std::max(abs(worst.lower), abs(worst.upper))) {
      frozen_value += worst.value;
      frozen_error += worst.error;
      continue;
    }
    auto left = detail::kronrod15<Scalar>(f, worst.lower, mid);
    auto right = detail::kronrod15<Scalar>(f, mid, worst.upper);
    out.evaluations += 30;
    ++intervals;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  value = frozen_value;
  error = frozen_error;
  Scalar worst_error = -1;
  while (!active.empty()) {
    const auto& p = active.top();
    if (p.error > worst_error) {
      worst_error = p.error;
      out.worst_lower = p.lower;
      out.worst_upper = p.upper;
    }
    value += p.value;
    error += p.error;
    active.pop();
  }
  if (frozen_error > tolerance(value)) out.converged = false;
  out.value = value;
  out.error = error;
  return out;
}

/// Adaptive quadrature on panels graded geometrically towards the ends of
/// [a, b], starting from widths left_scale and right_scale. For integrands
/// with a boundary layer of known width, which global bisection started from
/// a single 15-point panel can step over entirely. A non-positive or
/// non-finite scale means no grading at that end.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_graded(F&& f, Scalar a, Scalar b, Scalar left_scale,
                                          Scalar right_scale,
                                          const QuadratureOptions<Scalar>& options = {}) {
  using std::abs;
  QuadratureResult<Scalar> out;
  if (a == b) return out;
  const Scalar half = Scalar(0.5) * (b - a);
  const Scalar floor = half * Scalar(1e-12);
  auto clamp_scale = [&](Scalar s) {
    if (!(s > Scalar(0)) || !(s < half)) return half;
    return std::max(s, floor);
  };
  const Scalar mid = a + half;
  std::vector<Scalar> cuts{a};
  for (Scalar d = clamp_scale(left_scale); a + d < mid; d *= 2) cuts.push_back(a + d);
  cuts.push_back(mid);
  std::vector<Scalar> right;
  for (Scalar d = clamp_scale(right_scale); b - d > mid; d *= 2) right.push_back(b - d);
  cuts.insert(cuts.end(), right.rbegin(), right.rend());
  cuts.push_back(b);
  if (cuts.size() == 3) {  // no layer narrower than half the interval
    return integrate_adaptive(f, a, b, options);
  }

  Scalar coarse = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    coarse += abs(detail::kronrod15<Scalar>(f, cuts[i], cuts[i + 1]).value);
  }
  QuadratureOptions<Scalar> piece = options;
  piece.abs_tol = std::max(options.abs_tol,
                           options.rel_tol * coarse / static_cast<Scalar>(cuts.size() - 1));
  Scalar worst = -1;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const auto r = integrate_adaptive(f, cuts[i], cuts[i + 1], piece);
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
    if (r.error > worst) {
      worst = r.error;
      out.worst_lower = r.worst_lower;
      out.worst_upper = r.worst_upper;
    }
  }
  out.evaluations += 15 * (cuts.size() - 1);
  return out;
}

}  // namespace warped
