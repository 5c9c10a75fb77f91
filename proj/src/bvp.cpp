#include "warped/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/core.h>
#include <unsupported/Eigen/FFT>

#include "warped/errors.hpp"
#include "warped/operators.hpp"
#include "warped/parallel.hpp"
#include "warped/stencil.hpp"

namespace warped {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Returns the coefficients a_m = (1/N) sum_k x_k e^{-i m theta_k} for |m| <= M
// and accumulates the discarded energy.
Eigen::VectorXcd forward(const Eigen::VectorXcd& x, int M, double& total, double& kept) {
  const Eigen::Index n = x.size();
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(x.data(), x.data() + n), out;
  fft.fwd(out, in);
  const double scale = 1.0 / static_cast<double>(n);
  total = 0.0;
  for (const auto& v : out) total += std::norm(v * scale);
  Eigen::VectorXcd a(2 * M + 1);
  kept = 0.0;
  for (int m = -M; m <= M; ++m) {
    const Eigen::Index j = ((m % n) + n) % n;
    a[m + M] = out[static_cast<std::size_t>(j)] * scale;
    kept += std::norm(a[m + M]);
  }
  return a;
}

}  // namespace

BoundaryTrace BoundaryTrace::from_real(double radius, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& lap_u) {
  BoundaryTrace t{radius, u.cast<std::complex<double>>(), lap_u.cast<std::complex<double>>()};
  t.validate();
  return t;
}

Eigen::VectorXd BoundaryTrace::theta() const {
  const Eigen::Index n = size();
  Eigen::VectorXd th(n);
  for (Eigen::Index k = 0; k < n; ++k) th[k] = kTwoPi * static_cast<double>(k) / n;
  return th;
}

void BoundaryTrace::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("boundary trace: radius must be positive");
  }
  if (u.size() != lap_u.size()) {
    throw std::invalid_argument("boundary trace: u and lap_u lengths differ");
  }
  if (!power_of_two(u.size()) || u.size() < 4) {
    throw std::invalid_argument(
        fmt::format("boundary trace: N = {} is not a power of two >= 4", u.size()));
  }
  if (!u.allFinite() || !lap_u.allFinite()) {
    throw std::invalid_argument("boundary trace: non-finite sample");
  }
}

FourierSpectrum analyze_trace(const BoundaryTrace& trace, int M) {
  trace.validate();
  if (M < 0 || trace.size() < 2 * static_cast<Eigen::Index>(M) + 2) {
    throw std::invalid_argument(
        fmt::format("analyze_trace: need N >= 2M + 2 (N = {}, M = {})", trace.size(), M));
  }
  FourierSpectrum s;
  s.M = M;
  s.radius = trace.radius;
  double total_u = 0, kept_u = 0, total_l = 0, kept_l = 0;
  s.alpha = forward(trace.u, M, total_u, kept_u);
  s.beta = forward(trace.lap_u, M, total_l, kept_l);
  auto relative = [](double total, double kept) {
    return total > 0.0 ? std::max(0.0, total - kept) / total : 0.0;
  };
  s.truncation_energy = std::max(relative(total_u, kept_u), relative(total_l, kept_l));
  s.discarded_rms = std::sqrt(std::max(0.0, total_u - kept_u));
  s.aliasing_warning = s.truncation_energy > kAliasingThreshold;
  return s;
}

Eigen::VectorXcd synthesize_trace(const Eigen::VectorXcd& coefficients, int M, Eigen::Index n) {
  if (coefficients.size() != 2 * M + 1) {
    throw std::invalid_argument("synthesize_trace: expected 2M + 1 coefficients");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double th = kTwoPi * static_cast<double>(k) / n;
    for (int m = -M; m <= M; ++m) out[k] += coefficients[m + M] * std::polar(1.0, m * th);
  }
  return out;
}

LogComplex LogComplex::from(std::complex<double> z) {
  if (z == 0.0) return {};
  return {std::log(std::abs(z)), std::arg(z)};
}

// ---------------------------------------------------------------------------

ModeCoefficients solve_disk_biharmonic(const MetricProfile& profile, double radius,
                                       const FourierSpectrum& spectrum,
                                       const DiskOptions& options) {
  if (!(radius > 0.0) || radius > profile.r_max()) {
    throw DomainError(fmt::format("disk radius {} outside (0, {}]", radius, profile.r_max()));
  }
  if (std::abs(spectrum.radius - radius) > 1e-12 * radius) {
    throw std::invalid_argument(fmt::format("spectrum taken at r = {} but disk radius is {}",
                                            spectrum.radius, radius));
  }
  const int M = spectrum.M;
  ModeCoefficients out;
  out.radius = radius;
  out.M = M;
  out.truncation_energy = spectrum.truncation_energy;
  out.discarded_rms = spectrum.discarded_rms;
  out.grid = RadialGrid::uniform(0.0, radius, std::max<Eigen::Index>(options.grid_nodes, 5));
  const RadialGrid& grid = out.grid;
  const Eigen::Index n = grid.size();

  const ModeSolver solver(profile, radius, options.modes);
  // Tables with their exact slopes: (Lambda - |m| log r)' = |m| (1/phi - 1/r), z' = w.
  const std::size_t count = static_cast<std::size_t>(M) + 1;
  std::vector<Eigen::VectorXd> reg(count), reg_slope(count), zs(count), ws(count);
  parallel_for(count, [&](std::size_t k) {
    const int m = static_cast<int>(k);
    const LogMode h = solver.harmonic(m, grid);
    Eigen::VectorXd r(n), dr(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (grid[i] == 0.0) {
        r[i] = -m * solver.inverse_warp().regular_at_one();
        dr[i] = 0.0;
      } else {
        r[i] = h.lambda[i] - m * std::log(grid[i]);
        dr[i] = m * inverse_warp_excess(profile, grid[i]);
      }
    }
    reg[k] = std::move(r);
    reg_slope[k] = std::move(dr);
    ReductionFactor red = solver.reduction(m, grid);
    zs[k] = std::move(red.z);
    ws[k] = std::move(red.w);
  });
  for (std::size_t k = 0; k < count; ++k) {
    out.regular_lambda.emplace_back(grid, reg[k], reg_slope[k]);
    out.z.emplace_back(grid, zs[k], ws[k]);
  }

  out.modes.resize(static_cast<std::size_t>(2 * M + 1));
  for (int m = -M; m <= M; ++m) {
    const int k = std::abs(m);
    ModeCoefficient& c = out.modes[static_cast<std::size_t>(m + M)];
    c.m = m;
    c.lambda_R = reg[k][n - 1] + k * std::log(radius);
    c.z_R = zs[k][n - 1];
    c.log_form = std::abs(c.lambda_R) > options.log_switch;
    c.beta = spectrum.beta_at(m);
    c.c_scaled = spectrum.alpha_at(m) - c.beta * c.z_R;
    if (c.log_form) {
      c.c = LogComplex::from(c.c_scaled);
      c.c.log_abs -= c.lambda_R;
      c.d = LogComplex::from(c.beta);
      c.d.log_abs -= c.lambda_R;
    } else {
      const double inv = std::exp(-c.lambda_R);
      c.c = LogComplex::from(c.c_scaled * inv);
      c.d = LogComplex::from(c.beta * inv);
    }
    c.c_underflow = std::isfinite(c.c.log_abs) && c.c_value() == 0.0;
    c.d_underflow = std::isfinite(c.d.log_abs) && c.d_value() == 0.0;
  }
  return out;
}

SolutionValue evaluate_solution(const MetricProfile& profile, const ModeCoefficients& coeffs,
                                double r, double theta) {
  (void)profile;  // the radial tables already carry everything needed
  if (!(r >= 0.0) || r > coeffs.radius * (1.0 + 1e-14)) {
    throw DomainError(
        fmt::format("evaluate_solution: r = {} outside the disk of radius {}", r, coeffs.radius));
  }
  r = std::min(r, coeffs.radius);
  SolutionValue out{{0.0, 0.0}, coeffs.discarded_rms};
  for (const auto& c : coeffs.modes) {
    const int k = std::abs(c.m);
    if (k > 0 && r == 0.0) continue;
    const double lambda = coeffs.regular_lambda[k](r) + (k > 0 ? k * std::log(r) : 0.0);
    const double z = coeffs.z[k](r);
    const double scale = std::exp(lambda - c.lambda_R);
    out.value += scale * (c.c_scaled + c.beta * z) * std::polar(1.0, c.m * theta);
  }
  return out;
}

DiskResidualReport verify_disk_solution(const MetricProfile& profile,
                                        const ModeCoefficients& coeffs, const RadialGrid& grid,
                                        const BoundaryTrace* trace,
                                        const ModeOptions& options) {
  if (grid.front() <= 0.0 || grid.back() > coeffs.radius * (1.0 + 1e-14)) {
    throw std::invalid_argument("verify_disk_solution: grid must lie in (0, R]");
  }
  if (grid.size() < 5) throw std::invalid_argument("verify_disk_solution: need >= 5 nodes");
  const int M = coeffs.M;
  const Eigen::Index n = grid.size();
  const ModeSolver solver(profile, grid.back(), options);
  const DerivativeStencil stencil(grid);

  std::vector<std::optional<BiharmonicMode>> modes(static_cast<std::size_t>(M) + 1);
  parallel_for(modes.size(), [&](std::size_t k) {
    modes[k] = solver.biharmonic(static_cast<int>(k), grid);
  });

  DiskResidualReport rep;
  rep.mode_residual.assign(static_cast<std::size_t>(2 * M + 1), 0.0);
  parallel_for(rep.mode_residual.size(), [&](std::size_t idx) {
    const ModeCoefficient& c = coeffs.modes[idx];
    const BiharmonicMode& b = *modes[static_cast<std::size_t>(std::abs(c.m))];
    Eigen::VectorXcd f(n), target(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale = std::exp(b.lambda[i] - c.lambda_R);
      f[i] = scale * (c.c_scaled + c.beta * b.z[i]);
      target[i] = scale * c.beta;
    }
    const Eigen::VectorXcd lf = apply_radial_operator(profile, c.m, grid, stencil, f);
    const double norm = std::max(1.0, f.cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (Eigen::Index i = 1; i + 1 < n; ++i) worst = std::max(worst, std::abs(lf[i] - target[i]));
    rep.mode_residual[idx] = worst / norm;
  });
  rep.interior_max = *std::max_element(rep.mode_residual.begin(), rep.mode_residual.end());

  if (trace) {
    trace->validate();
    Eigen::VectorXcd a(2 * M + 1), b(2 * M + 1);
    for (const auto& c : coeffs.modes) {
      // c phi(R) + d psi(R) and d phi(R) from the stored coefficients.
      a[c.m + M] = c.c.scaled(c.lambda_R) + c.d.scaled(c.lambda_R) * c.z_R;
      b[c.m + M] = c.d.scaled(c.lambda_R);
    }
    const Eigen::VectorXcd u = synthesize_trace(a, M, trace->size());
    const Eigen::VectorXcd lap = synthesize_trace(b, M, trace->size());
    rep.boundary_error = (u - trace->u).cwiseAbs().maxCoeff() /
                         std::max(1.0, trace->u.cwiseAbs().maxCoeff());
    rep.boundary_lap_error = (lap - trace->lap_u).cwiseAbs().maxCoeff() /
                             std::max(1.0, trace->lap_u.cwiseAbs().maxCoeff());
  }
  return rep;
}

}  // namespace warped
