#include "warped/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "warped/errors.hpp"
#include "warped/parallel.hpp"

namespace warped {

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> r(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) r[i] = std::exp(a + (b - a) * i / (n - 1));
  r.front() = lo;
  r.back() = hi;
  return r;
}

// Least squares y = c0 + c1 x; returns {c0, c1, rms residual}.
std::array<double, 3> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  const double icept = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - icept - slope * x[i];
    ss += e * e;
  }
  return {icept, slope, std::sqrt(ss / n)};
}

}  // namespace

LimitEstimate estimate_log_derivative_limit(const MetricProfile& profile, double horizon,
                                            int samples) {
  if (!(horizon > 0.0) || horizon > profile.r_max()) {
    throw DomainError(fmt::format("limit estimate: horizon {} outside (0, {}]", horizon,
                                  profile.r_max()));
  }
  samples = std::max(samples, 3);
  LimitEstimate est;
  for (int k = samples - 1; k >= 0; --k) {
    const double r = std::ldexp(horizon, -k);
    est.radii.push_back(r);
    est.values.push_back(profile.log_derivative(r));
  }
  const auto& v = est.values;
  const std::size_t n = v.size();
  est.last = v[n - 1];
  bool up = true, down = true;
  for (std::size_t i = 1; i < n; ++i) {
    up = up && v[i] >= v[i - 1];
    down = down && v[i] <= v[i - 1];
  }
  est.monotone = up || down;

  const double d1 = v[n - 2] - v[n - 3];
  const double d2 = v[n - 1] - v[n - 2];
  const double den = d2 - d1;
  est.extrapolated = est.last;
  // Aitken only for a contracting, non-oscillating tail.
  if (d1 * d2 > 0.0 && std::abs(d2) < std::abs(d1) &&
      std::abs(den) > 1e-14 * std::max(1.0, std::abs(est.last))) {
    est.extrapolated = est.last - d2 * d2 / den;
  }
  return est;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need >= 2 paired samples");
  }
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return line_fit(lx, ly)[1];
}

double mean_integral_ratio_slope(const ModeSolver& solver, double lo, double hi, int samples) {
  const auto r = log_spaced(lo, hi, std::max(samples, 2));
  std::vector<double> q(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) q[i] = solver.mean_integral_ratio(r[i]);
  return loglog_slope(r, q);
}

// ---------------------------------------------------------------------------

TailFit fit_tail_exponent(const std::function<double(double)>& curvature, double lo,
                          double hi, const FitOptions& options) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("tail fit: bad window");
  TailFit fit;
  const auto r = log_spaced(lo, hi, std::max(options.samples, 16));
  std::vector<double> lr(r.size()), lk(r.size()), k(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    k[i] = curvature(r[i]);
    if (!(k[i] < 0.0)) {
      fit.note = fmt::format("K = {} >= 0 at r = {}: not classifiable by tail", k[i], r[i]);
      return fit;
    }
    lr[i] = std::log(r[i]);
    lk[i] = std::log(-k[i]);
  }
  fit.classifiable = true;
  const auto power = line_fit(lr, lk);
  fit.power_coefficient = std::exp(power[0]);
  fit.power_exponent = power[1];
  fit.power_residual = power[2];

  if (lo > 1.0) {
    // log(-K) = log c - 2 log r - log log r
    double mean = 0.0;
    std::vector<double> shift(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      shift[i] = lk[i] + 2.0 * lr[i] + std::log(lr[i]);
      mean += shift[i];
    }
    mean /= static_cast<double>(r.size());
    double ss = 0.0;
    for (double s : shift) ss += (s - mean) * (s - mean);
    fit.log_coefficient = std::exp(mean);
    fit.log_residual = std::sqrt(ss / static_cast<double>(r.size()));
    fit.log_template_wins = *fit.log_residual <= fit.power_residual;
  }
  fit.residual = fit.log_template_wins ? *fit.log_residual : fit.power_residual;
  if (fit.residual > options.max_residual) {
    fit.note = fmt::format("fit residual {:.3g} above {:.3g}", fit.residual,
                           options.max_residual);
    return fit;
  }

  TailDescriptor d;
  d.r0 = lo;
  if (fit.log_template_wins) {
    const double c = *fit.log_coefficient;
    if (c > 1.0) {
      d.cls = TailClass::log_upper;
      d.eps = c - 1.0;
    } else {
      d.cls = TailClass::log_lower;
    }
    fit.descriptor = d;
    return fit;
  }

  const double p = fit.power_exponent;
  if (p > 2.0 + options.exponent_slack) {
    // K <= -r^{2+eps} needs c r^p >= r^{2+eps} on the window.
    double eps = p - 2.0;
    if (fit.power_coefficient < 1.0) {
      eps = lo > 1.0 ? eps + std::log(fit.power_coefficient) / std::log(lo) : -1.0;
    }
    if (eps > 0.0) {
      d.cls = TailClass::power;
      d.eps = eps;
      fit.descriptor = d;
    } else {
      fit.note = "power tail too weak at the window start";
    }
  } else if (std::abs(p - 2.0) <= options.exponent_slack && lo > 1.0) {
    double eta = 0.0, upper = HUGE_VAL;
    for (std::size_t i = 0; i < r.size(); ++i) {
      eta = std::max(eta, -k[i] / (r[i] * r[i]));
      upper = std::min(upper, -k[i] * r[i] * r[i] * lr[i]);
    }
    if (upper > 1.0) {
      d.cls = TailClass::band;
      d.eta = eta * (1.0 + 1e-9);
      d.eps = std::min(1.0, upper - 1.0);
      fit.descriptor = d;
    } else {
      fit.note = "quadratic tail not below the log threshold";
    }
  } else if (p < -2.0 - options.exponent_slack && lo > 1.0) {
    d.cls = TailClass::log_lower;
    fit.descriptor = d;
  } else {
    fit.note = fmt::format("exponent {:.3f} lies between the covered regimes", p);
  }
  return fit;
}

// ---------------------------------------------------------------------------

const ModeEvidence* NumericEvidence::find(int m) const {
  for (const auto& e : modes) {
    if (e.m == m) return &e;
  }
  return nullptr;
}

NumericEvidence numeric_evidence(const MetricProfile& profile, const std::vector<int>& m_set,
                                 double horizon, const EvidenceOptions& options) {
  if (m_set.empty()) throw std::invalid_argument("numeric evidence: empty m set");
  if (!(horizon > 0.0) || horizon > profile.r_max()) {
    throw DomainError(fmt::format("numeric evidence: horizon {} outside (0, {}]", horizon,
                                  profile.r_max()));
  }
  const int per_octave = std::max(options.nodes_per_octave, 2);
  std::vector<double> nodes;
  for (int j = 0;; ++j) {
    const double r = horizon * std::exp2(-static_cast<double>(j) / per_octave);
    if (r < options.first_radius && j > 2 * per_octave + 2) break;
    nodes.push_back(r);
  }
  std::reverse(nodes.begin(), nodes.end());
  const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
  const Eigen::Index i_full = n - 1, i_half = n - 1 - per_octave,
                     i_quarter = n - 1 - 2 * per_octave;
  const RadialGrid grid =
      RadialGrid::from_nodes(Eigen::Map<const Eigen::VectorXd>(nodes.data(), n));

  NumericEvidence ev;
  ev.horizon = horizon;
  const ModeSolver solver(profile, horizon, options.modes);

  ev.modes.resize(m_set.size());
  parallel_for(m_set.size(), [&](std::size_t k) {
    const int m = m_set[k];
    const BiharmonicMode mode = solver.biharmonic(m, grid);
    ModeEvidence& e = ev.modes[k];
    e.m = m;
    e.phi_m = log_convergence_verdict(mode.lambda[i_quarter], mode.lambda[i_half],
                                      mode.lambda[i_full], options.rule);
    e.z = log_convergence_verdict(std::log(mode.z[i_quarter]), std::log(mode.z[i_half]),
                                  std::log(mode.z[i_full]), options.rule);
    std::vector<double> x, y;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (grid[i] >= horizon / 10.0 * (1.0 - 1e-12)) {
        x.push_back(grid[i]);
        y.push_back(mode.w[i]);
      }
    }
    e.ratio_slope = loglog_slope(x, y);
    e.lambda_at_horizon = mode.lambda[i_full];
    e.z_at_horizon = mode.z[i_full];
    e.w_max = mode.w.maxCoeff();
  });

  ev.log_derivative = estimate_log_derivative_limit(profile, horizon);
  ev.ratio_slope = mean_integral_ratio_slope(solver, horizon / 10.0, horizon);
  ev.phi_growth =
      log_convergence_verdict(profile.log_phi(grid[i_quarter]), profile.log_phi(grid[i_half]),
                              profile.log_phi(grid[i_full]), options.rule);
  ev.phi_nondecreasing = true;
  double prev = -HUGE_VAL;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (grid[i] < horizon / 100.0) continue;
    const double g = profile.log_phi(grid[i]);
    if (g < prev - 1e-12 * std::max(1.0, std::abs(prev))) ev.phi_nondecreasing = false;
    prev = g;
  }
  return ev;
}

// ---------------------------------------------------------------------------

const char* to_string(HarmonicRegime regime) {
  switch (regime) {
    case HarmonicRegime::parabolic:
      return "parabolic";
    case HarmonicRegime::hyperbolic:
      return "hyperbolic";
    case HarmonicRegime::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

const char* to_string(BiharmonicRegime regime) {
  switch (regime) {
    case BiharmonicRegime::rigid:
      return "rigid";
    case BiharmonicRegime::liouville_to_harmonic:
      return "liouville_to_harmonic";
    case BiharmonicRegime::admits_nonharmonic_bounded:
      return "admits_nonharmonic_bounded";
    case BiharmonicRegime::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

const char* to_string(Route route) {
  switch (route) {
    case Route::declared_tail:
      return "declared_tail";
    case Route::numeric:
      return "numeric";
    case Route::both:
      return "both";
    case Route::none:
      return "none";
  }
  return "none";
}

const char* to_string(TailSource source) {
  switch (source) {
    case TailSource::declared:
      return "declared";
    case TailSource::fitted:
      return "fitted";
    case TailSource::none:
      return "none";
  }
  return "none";
}

namespace {

void classify_by_tail(const TailDescriptor& tail, const NumericEvidence& ev,
                      ClassificationReport& rep) {
  switch (tail.cls) {
    case TailClass::log_lower:
      // The parabolic and rigid conclusions also need phi -> infinity.
      if (ev.phi_growth == Verdict::unbounded) {
        rep.harmonic_by_tail = HarmonicRegime::parabolic;
        rep.biharmonic_by_tail = BiharmonicRegime::rigid;
      }
      break;
    case TailClass::log_upper:
      rep.harmonic_by_tail = HarmonicRegime::hyperbolic;
      break;
    case TailClass::band:
      rep.harmonic_by_tail = HarmonicRegime::hyperbolic;
      if (ev.phi_nondecreasing) rep.biharmonic_by_tail = BiharmonicRegime::liouville_to_harmonic;
      break;
    case TailClass::power:
      rep.harmonic_by_tail = HarmonicRegime::hyperbolic;
      if (ev.phi_nondecreasing) {
        rep.biharmonic_by_tail = BiharmonicRegime::admits_nonharmonic_bounded;
      }
      break;
    case TailClass::custom:
      break;
  }
  // Labels must not contradict the sampled verdicts they imply.
  const bool any_unbounded = std::any_of(ev.modes.begin(), ev.modes.end(), [](const auto& e) {
    return (e.m != 0 && e.phi_m == Verdict::unbounded) || e.z == Verdict::unbounded;
  });
  if (rep.biharmonic_by_tail == BiharmonicRegime::admits_nonharmonic_bounded && any_unbounded) {
    rep.biharmonic_by_tail = BiharmonicRegime::undetermined;
  }
  if (rep.biharmonic_by_tail == BiharmonicRegime::rigid) {
    for (const auto& e : ev.modes) {
      if ((e.m != 0 && e.phi_m == Verdict::bounded) || e.z == Verdict::bounded) {
        rep.biharmonic_by_tail = BiharmonicRegime::undetermined;
      }
    }
  }
}

void classify_by_evidence(const NumericEvidence& ev, ClassificationReport& rep) {
  const ModeEvidence* first = nullptr;
  for (const auto& e : ev.modes) {
    if (e.m != 0 && (!first || std::abs(e.m) < std::abs(first->m))) first = &e;
  }
  if (!first) return;
  if (first->phi_m == Verdict::bounded) rep.harmonic_by_evidence = HarmonicRegime::hyperbolic;
  if (first->phi_m == Verdict::unbounded) rep.harmonic_by_evidence = HarmonicRegime::parabolic;

  auto all = [&](auto pred) { return std::all_of(ev.modes.begin(), ev.modes.end(), pred); };
  auto phi_all = [&](Verdict v) {
    return all([&](const ModeEvidence& e) { return e.m == 0 || e.phi_m == v; });
  };
  auto z_all = [&](Verdict v) { return all([&](const ModeEvidence& e) { return e.z == v; }); };

  if (phi_all(Verdict::unbounded) && z_all(Verdict::unbounded) &&
      ev.phi_growth == Verdict::unbounded) {
    rep.biharmonic_by_evidence = BiharmonicRegime::rigid;
  } else if (phi_all(Verdict::bounded) && z_all(Verdict::unbounded) && ev.phi_nondecreasing) {
    rep.biharmonic_by_evidence = BiharmonicRegime::liouville_to_harmonic;
  } else if (phi_all(Verdict::bounded) && z_all(Verdict::bounded)) {
    rep.biharmonic_by_evidence = BiharmonicRegime::admits_nonharmonic_bounded;
  }
}

template <typename Label>
Label combine(Label by_tail, Label by_evidence, Label undetermined, bool& conflict,
              bool& used_tail, bool& used_evidence) {
  const bool t = by_tail != undetermined;
  const bool e = by_evidence != undetermined;
  if (t && e && by_tail != by_evidence) {
    conflict = true;
    return undetermined;
  }
  used_tail = used_tail || t;
  used_evidence = used_evidence || e;
  return t ? by_tail : by_evidence;
}

}  // namespace

ClassificationReport classify(const Surface& surface, const ClassifyOptions& options) {
  const double horizon = options.horizon;
  const MetricProfile& profile = surface.profile;
  ClassificationReport rep;
  rep.horizon = horizon;

  std::vector<int> m_set;
  for (int m = 0; m <= std::max(options.m_max, 1); ++m) m_set.push_back(m);
  rep.evidence = numeric_evidence(profile, m_set, horizon, options.evidence);

  std::function<double(double)> curvature;
  if (surface.curvature) {
    curvature = [&k = *surface.curvature](double r) { return k(r); };
  } else {
    curvature = [&profile](double r) { return profile.curvature(r); };
  }
  if (surface.curvature && surface.curvature->tail()) {
    rep.tail = *surface.curvature->tail();
    rep.tail_source = TailSource::declared;
  } else {
    const double lo = std::max(2.0, horizon / 100.0);
    if (lo < horizon) {
      rep.fit = fit_tail_exponent(curvature, lo, horizon, options.fit);
      if (rep.fit->descriptor) {
        rep.tail = rep.fit->descriptor;
        rep.tail_source = TailSource::fitted;
      }
    }
  }
  if (rep.tail) {
    rep.tail_check = verify_tail(curvature, *rep.tail, horizon);
    if (rep.tail_check->holds) classify_by_tail(*rep.tail, rep.evidence, rep);
  }
  classify_by_evidence(rep.evidence, rep);

  bool used_tail = false, used_evidence = false;
  rep.harmonic = combine(rep.harmonic_by_tail, rep.harmonic_by_evidence,
                         HarmonicRegime::undetermined, rep.conflict, used_tail, used_evidence);
  rep.biharmonic =
      combine(rep.biharmonic_by_tail, rep.biharmonic_by_evidence,
              BiharmonicRegime::undetermined, rep.conflict, used_tail, used_evidence);
  rep.route = used_tail && used_evidence ? Route::both
              : used_tail                ? Route::declared_tail
              : used_evidence            ? Route::numeric
                                         : Route::none;
  return rep;
}

ClassificationReport classify(const CurvatureProfile& curvature, const ClassifyOptions& options) {
  Surface s{profile_from_curvature(curvature, options.horizon), curvature};
  return classify(s, options);
}

HarmonicRegime classify_harmonic(const Surface& surface, const ClassifyOptions& options) {
  return classify(surface, options).harmonic;
}

BiharmonicRegime classify_biharmonic(const Surface& surface, const ClassifyOptions& options) {
  return classify(surface, options).biharmonic;
}

}  // namespace warped
