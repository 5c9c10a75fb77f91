#include "warped/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <vector>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "warped/asymptotics.hpp"
#include "warped/bvp.hpp"
#include "warped/errors.hpp"
#include "warped/interpolation.hpp"
#include "warped/modes.hpp"
#include "warped/parallel.hpp"
#include "warped/suites.hpp"

namespace warped::cli {

namespace {

TailClass parse_tail_class(const std::string& s) {
  for (TailClass c : {TailClass::log_lower, TailClass::log_upper, TailClass::band,
                      TailClass::power, TailClass::custom}) {
    if (s == to_string(c)) return c;
  }
  throw UsageError(fmt::format("unknown tail class '{}'", s));
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / file, std::ios::binary);
  if (!os) throw UsageError(fmt::format("cannot write '{}'", (dir / file).string()));
  return os;
}

// Runs a command body, mapping exceptions onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const ParseError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const ConjugatePointError& e) {
    fmt::print(err, "numeric failure: {}\n", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    fmt::print(err, "numeric failure: {}\n", e.what());
    return kNumeric;
  }
}

// phi'' off by `factor` (1 + |phi''|), everything else delegated: a deliberate
// inconsistency for exercising the stencil suite.
MetricProfile with_bad_second_derivative(const MetricProfile& p, double factor) {
  AnalyticWarp w;
  w.phi = [p](double r) { return p.phi(r); };
  w.phi_prime = [p](double r) { return p.phi_prime(r); };
  w.phi_second = [p, factor](double r) {
    const double exact = p.phi_second(r);
    return exact + factor * (1.0 + std::abs(exact));
  };
  w.log_phi = [p](double r) { return p.log_phi(r); };
  w.log_derivative = [p](double r) { return p.log_derivative(r); };
  return analytic_profile(p.name() + "+fault", std::move(w), p.r_max());
}

Surface build_surface(const RunConfig& config, double extent) {
  if (config.family != "tabulated") {
    try {
      return builtin_surface(config.family, config.params, extent, config.step);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  require(config.curvature_file.has_value(), "tabulated profile needs a curvature file");
  std::ifstream in(*config.curvature_file);
  require(static_cast<bool>(in),
          fmt::format("cannot open '{}'", config.curvature_file->string()));
  auto [r, k] = read_curvature_csv(in);
  const NaturalCubicSpline spline(r, k);
  require(spline.back() >= extent,
          fmt::format("curvature table ends at r = {} but the profile is needed to {}",
                      spline.back(), extent));
  auto curvature = [spline](double s) { return spline(std::max(s, spline.front())); };
  CurvatureProfile profile(curvature, config.display_name(), config.tail);
  return Surface{profile_from_curvature(profile, extent, config.step), profile};
}

}  // namespace

double RunConfig::profile_extent() const { return r_max.value_or(std::max(horizon, radius)); }

void RunConfig::validate() const {
  const auto& names = builtin_names();
  require(family == "tabulated" || std::find(names.begin(), names.end(), family) != names.end(),
          fmt::format("unknown profile '{}' (see `profiles`)", family));
  require(family != "tabulated" || curvature_file.has_value(),
          "tabulated profile needs a curvature file");
  require(step.rel_tol > 0 && step.abs_tol > 0 && boundary_tol > 0,
          "tolerances must be positive");
  require(step.start_radius > 0 && step.max_step > 0, "step controls must be positive");
  require(horizon > 0, "horizon must be positive");
  require(m_max >= 0, "m-range [-mmax, mmax] needs mmax >= 0");
  require(grid >= 3, "grid needs at least 3 nodes");
  require(first_radius > 0 && first_radius < horizon, "first radius must lie in (0, horizon)");
  require(radius > 0, "BVP radius must be positive");
  require(truncation >= 0, "truncation order must be >= 0");
  if (r_max) {
    require(horizon <= *r_max, fmt::format("horizon {} exceeds R_max {}", horizon, *r_max));
    require(radius <= *r_max, fmt::format("BVP radius {} exceeds R_max {}", radius, *r_max));
  }
}

void RunConfig::apply(const KeyValueFile& file) {
  using Setter = std::function<void(const std::string&)>;
  auto number = [](const std::string& v) { return parse_double(v); };
  auto integer = [](const std::string& v) { return parse_long(v); };
  auto tail_ref = [this]() -> TailDescriptor& {
    if (!tail) tail = TailDescriptor{};
    return *tail;
  };
  const std::vector<std::pair<std::string, Setter>> keys = {
      {"profile.family", [&](const std::string& v) { family = v; }},
      {"profile.name", [&](const std::string& v) { name = v; }},
      {"profile.eps", [&](const std::string& v) { params.eps = number(v); }},
      {"profile.eta", [&](const std::string& v) { params.eta = number(v); }},
      {"profile.r0", [&](const std::string& v) { params.r0 = number(v); }},
      {"profile.rmax", [&](const std::string& v) { r_max = number(v); }},
      {"profile.rel_tol", [&](const std::string& v) { step.rel_tol = number(v); }},
      {"profile.abs_tol", [&](const std::string& v) { step.abs_tol = number(v); }},
      {"profile.start_radius", [&](const std::string& v) { step.start_radius = number(v); }},
      {"profile.max_step", [&](const std::string& v) { step.max_step = number(v); }},
      {"profile.curvature_file", [&](const std::string& v) { curvature_file = v; }},
      {"profile.tail", [&](const std::string& v) { tail_ref().cls = parse_tail_class(v); }},
      {"profile.tail_eps", [&](const std::string& v) { tail_ref().eps = number(v); }},
      {"profile.tail_eta", [&](const std::string& v) { tail_ref().eta = number(v); }},
      {"profile.tail_r0", [&](const std::string& v) { tail_ref().r0 = number(v); }},
      {"run.horizon", [&](const std::string& v) { horizon = number(v); }},
      {"run.mmax", [&](const std::string& v) { m_max = static_cast<int>(integer(v)); }},
      {"run.grid", [&](const std::string& v) { grid = integer(v); }},
      {"run.first_radius", [&](const std::string& v) { first_radius = number(v); }},
      {"run.out", [&](const std::string& v) { out = v; }},
      {"run.seed", [&](const std::string& v) { seed = static_cast<std::uint64_t>(integer(v)); }},
      {"bvp.trace", [&](const std::string& v) { trace = v; }},
      {"bvp.radius", [&](const std::string& v) { radius = number(v); }},
      {"bvp.modes", [&](const std::string& v) { truncation = static_cast<int>(integer(v)); }},
      {"bvp.tol", [&](const std::string& v) { boundary_tol = number(v); }},
  };
  for (const auto& [key, value] : file.entries()) {
    const bool bare = key.find('.') == std::string::npos;
    auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& entry) {
      const std::string& full = entry.first;
      return full == key || (bare && full.substr(full.find('.') + 1) == key);
    });
    require(it != keys.end(), fmt::format("unknown config key '{}'", key));
    it->second(value);
  }
}

Surface make_surface(const RunConfig& config) {
  config.validate();
  return build_surface(config, config.profile_extent());
}

int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const Surface surface = build_surface(config, config.r_max.value_or(config.horizon));
    ClassifyOptions options;
    options.horizon = config.horizon;
    options.m_max = config.m_max;
    options.evidence.first_radius = config.first_radius;
    const ClassificationReport report = classify(surface, options);

    write_report(out, report, config.display_name());
    auto text = open_output(config.out, "classification.txt");
    write_report(text, report, config.display_name());
    auto csv = open_output(config.out, "evidence.csv");
    write_evidence_csv(csv, report.evidence);

    const bool determinate = report.harmonic != HarmonicRegime::undetermined ||
                             report.biharmonic != BiharmonicRegime::undetermined;
    return determinate ? kOk : kUndetermined;
  });
}

int cmd_modes(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const Surface surface = build_surface(config, config.r_max.value_or(config.horizon));
    const MetricProfile& profile = surface.profile;
    const RadialGrid grid = RadialGrid::geometric(config.first_radius, config.horizon, config.grid);
    const ModeSolver solver(profile, config.horizon);

    const auto count = static_cast<std::size_t>(config.m_max + 1);
    std::vector<std::optional<BiharmonicMode>> modes(count);
    std::vector<ModeResidualReport> residuals(count);
    parallel_for(count, [&](std::size_t k) {
      modes[k] = solver.biharmonic(static_cast<int>(k), grid);
      residuals[k] = verify_mode_residuals(profile, *modes[k]);
    });

    auto profile_csv = open_output(config.out, "profile.csv");
    write_profile_csv(profile_csv, profile, grid);
    fmt::print(out, "profile = {}\nnodes = {} geometric on [{}, {}]\n", config.display_name(),
               grid.size(), format_double(grid.front()), format_double(grid.back()));
    fmt::print(out, "modes depend on |m| only; files are written for m = 0..{}\n", config.m_max);
    fmt::print(out, "{:>3} {:>14} {:>14} {:>11} {:>11} {:>11} {:>11}\n", "m", "lambda_m(R)",
               "z(R)", "phi_max", "phi_rms", "psi_max", "psi_rms");
    for (std::size_t k = 0; k < count; ++k) {
      const BiharmonicMode& mode = *modes[k];
      auto csv = open_output(config.out, fmt::format("mode_{}.csv", k));
      write_mode_csv(csv, mode);
      auto res = open_output(config.out, fmt::format("residual_{}.csv", k));
      write_residual_csv(res, grid, residuals[k].harmonic);
      const Eigen::Index last = grid.size() - 1;
      const auto& r = residuals[k];
      fmt::print(out, "{:>3} {:>14.6e} {:>14.6e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}\n", k,
                 mode.lambda[last], mode.z[last], r.harmonic_max, r.harmonic_rms,
                 r.biharmonic_max, r.biharmonic_rms);
    }
    return kOk;
  });
}

int cmd_bvp(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    require(config.trace.has_value(), "bvp needs --trace");
    std::ifstream in(*config.trace);
    require(static_cast<bool>(in), fmt::format("cannot open '{}'", config.trace->string()));
    const BoundaryTrace trace = read_trace_csv(in, config.radius);

    int M = config.truncation;
    const auto max_order = static_cast<int>((trace.size() - 2) / 2);
    if (M > max_order) {
      fmt::print(err, "note: truncation lowered to M = {} for {} samples\n", max_order,
                 trace.size());
      M = max_order;
    }
    const Surface surface = build_surface(config, config.r_max.value_or(config.radius));
    const FourierSpectrum spectrum = analyze_trace(trace, M);
    const ModeCoefficients coeffs = solve_disk_biharmonic(surface.profile, config.radius, spectrum);
    const auto report = verify_disk_solution(
        surface.profile, coeffs, RadialGrid::uniform(0.1 * config.radius, config.radius, 101),
        &trace);

    auto csv = open_output(config.out, "coefficients.csv");
    write_coefficients_csv(csv, coeffs);

    fmt::print(out, "profile = {}\nradius = {}\nsamples = {}\nM = {}\n", config.display_name(),
               format_double(config.radius), trace.size(), M);
    fmt::print(out, "truncation_energy = {:.3e}\n", spectrum.truncation_energy);
    if (spectrum.aliasing_warning) {
      fmt::print(out, "warning: trace energy beyond M exceeds {:.0e}; raise M or N\n",
                 kAliasingThreshold);
    }
    double scale = 0.0;
    for (const auto& c : coeffs.modes) {
      scale = std::max({scale, std::abs(c.c_value()), std::abs(c.d_value())});
    }
    fmt::print(out, "{:>4} {:>24} {:>24} {:>10}\n", "m", "c_m", "d_m", "z(R)");
    for (const auto& c : coeffs.modes) {
      const auto cv = c.c_value();
      const auto dv = c.d_value();
      if (std::max(std::abs(cv), std::abs(dv)) <= 1e-12 * scale) continue;
      fmt::print(out, "{:>4} {:>11.4e}{:+11.4e}i {:>11.4e}{:+11.4e}i {:>10.3e}{}\n", c.m,
                 cv.real(), cv.imag(), dv.real(), dv.imag(), c.z_R,
                 c.c_underflow || c.d_underflow ? " underflow" : "");
    }
    double worst_mode = 0.0;
    for (double r : report.mode_residual) worst_mode = std::max(worst_mode, r);
    const double boundary = std::max(*report.boundary_error, *report.boundary_lap_error);
    fmt::print(out, "mode_residual_max = {:.3e}\ninterior_residual_max = {:.3e}\n", worst_mode,
               report.interior_max);
    fmt::print(out, "boundary_error = {:.3e}\nboundary_lap_error = {:.3e}\n",
               *report.boundary_error, *report.boundary_lap_error);
    const bool ok = boundary <= config.boundary_tol;
    fmt::print(out, "boundary reproduction {} (tolerance {:.0e})\n", ok ? "ok" : "FAILED",
               config.boundary_tol);
    return ok ? kOk : kFailed;
  });
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.step.rel_tol < kMinTolerance || config.step.abs_tol < kMinTolerance * 1e-2) {
    fmt::print(out, "tolerance-infeasible: rel_tol {:.1e} / abs_tol {:.1e} below what double "
                    "precision can deliver (rel_tol >= {:.0e})\n",
               config.step.rel_tol, config.step.abs_tol, kMinTolerance);
    return kInfeasible;
  }
  return guarded(err, [&] {
    config.validate();
    require(config.inject_fault.empty() || config.inject_fault == "phi-second",
            fmt::format("unknown fault '{}'", config.inject_fault));
    const double extent = config.r_max.value_or(std::max(config.horizon, 3.0));
    const Surface surface = build_surface(config, extent);
    const MetricProfile profile = config.inject_fault == "phi-second"
                                      ? with_bad_second_derivative(surface.profile, 0.1)
                                      : surface.profile;
    std::vector<double> radii;
    for (double r : {1.0, 3.0}) {
      if (r <= extent) radii.push_back(r);
    }
    ClassifyOptions classify_options;
    classify_options.horizon = config.horizon;
    classify_options.m_max = config.m_max;
    classify_options.evidence.first_radius = config.first_radius;

    const std::vector<SuiteResult> results = {
        stencil_suite(profile),
        comparison_suite(config.seed),
        round_trip_suite(profile, radii, config.seed),
        regime_evidence_suite(surface, classify_options),
    };

    auto file = open_output(config.out, "verify.txt");
    bool all = true;
    for (std::ostream* os : {&out, static_cast<std::ostream*>(&file)}) {
      fmt::print(*os, "profile = {}\n", profile.name());
      for (const auto& r : results) {
        fmt::print(*os, "[{}] {}\n", r.passed ? "PASS" : "FAIL", r.name);
        for (const auto& d : r.details) fmt::print(*os, "    {}\n", d);
      }
    }
    for (const auto& r : results) all = all && r.passed;
    fmt::print(out, "{}\n", all ? "all suites passed" : "some suites FAILED");
    return all ? kOk : kFailed;
  });
}

int cmd_profiles(std::ostream& out) {
  fmt::print(out,
             "euclidean            phi = r, K = 0\n"
             "hyperbolic           phi = sinh r, K = -1\n"
             "log-threshold        K = -(1+eps)/(r^2 log r) beyond R0+1   (--eps, --r0; R0 >= 2, "
             "default 2)\n"
             "power-curvature      K = -r^(2+eps) beyond R0+1             (--eps, --r0; default "
             "R0 = 1)\n"
             "quadratic-curvature  K = -eta r^2 beyond R0+1               (--eta, --r0; default "
             "R0 = 1)\n"
             "tabulated            K from an `r,K` CSV (--curvature), natural cubic spline\n"
             "\nCurvature families hold K at its R0+1 value on [0, R0] and blend on [R0, R0+1].\n");
  return kOk;
}

}  // namespace warped::cli
