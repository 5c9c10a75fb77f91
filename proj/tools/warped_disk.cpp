// warped_disk: harmonic/biharmonic regimes and disk BVPs on warped-product
// surfaces dr^2 + phi(r)^2 dtheta^2.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "warped/cli.hpp"

namespace {

template <typename T>
void overlay(T& target, const std::optional<T>& flag) {
  if (flag) target = *flag;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace warped::cli;

  CLI::App app{"Liouville-type regimes and disk biharmonic problems on rotationally "
               "symmetric surfaces"};
  app.require_subcommand(1);

  std::optional<std::string> config_file, profile, curvature, out;
  std::optional<double> eps, eta, r0, rmax, horizon, tol, radius, boundary_tol;
  std::optional<int> mmax, modes;
  std::optional<long> grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> trace, fault;

  app.add_option("--config", config_file, "Key-value config file; flags override it");
  app.add_option("--profile", profile, "Built-in family or `tabulated` (see `profiles`)");
  app.add_option("--curvature", curvature, "r,K CSV for the tabulated family");
  app.add_option("--eps", eps, "Family parameter epsilon");
  app.add_option("--eta", eta, "Family parameter eta");
  app.add_option("--r0", r0, "Radius where the declared tail starts blending in");
  app.add_option("--rmax", rmax, "Radius the metric is integrated to");
  app.add_option("--horizon", horizon, "Largest radius sampled for evidence and modes");
  app.add_option("--mmax", mmax, "Modes m in [-mmax, mmax]");
  app.add_option("--grid", grid, "Radial nodes for `modes`");
  app.add_option("--tol", tol, "Relative tolerance of the curvature ODE");
  app.add_option("--out", out, "Output directory");
  app.add_option("--seed", seed, "Seed for the randomized suites");
  app.fallthrough();

  auto* classify = app.add_subcommand("classify", "Classify harmonic and biharmonic regimes");
  auto* modes_cmd = app.add_subcommand("modes", "Write mode_<m>.csv tables and residuals");
  auto* bvp = app.add_subcommand("bvp", "Solve the disk biharmonic problem from a trace CSV");
  bvp->add_option("--trace", trace, "CSV with theta,u,lap_u at equispaced theta")->required();
  bvp->add_option("--radius", radius, "Disk radius R");
  bvp->add_option("--modes", modes, "Fourier truncation order M");
  bvp->add_option("--boundary-tol", boundary_tol, "Allowed boundary reproduction error");
  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--inject-fault", fault)->group("");
  auto* profiles = app.add_subcommand("profiles", "List built-in profiles");
  for (auto* sub : {classify, modes_cmd, bvp, verify, profiles}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (profiles->parsed()) return cmd_profiles(std::cout);

  RunConfig config;
  try {
    if (config_file) config.apply(warped::KeyValueFile::load(*config_file));
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  overlay(config.family, profile);
  if (curvature) config.curvature_file = *curvature;
  overlay(config.params.eps, eps);
  overlay(config.params.eta, eta);
  if (r0) config.params.r0 = *r0;
  if (rmax) config.r_max = *rmax;
  overlay(config.horizon, horizon);
  overlay(config.m_max, mmax);
  if (grid) config.grid = *grid;
  overlay(config.step.rel_tol, tol);
  if (out) config.out = *out;
  overlay(config.seed, seed);
  if (trace) config.trace = *trace;
  overlay(config.radius, radius);
  overlay(config.truncation, modes);
  overlay(config.boundary_tol, boundary_tol);
  overlay(config.inject_fault, fault);

  if (classify->parsed()) return cmd_classify(config, std::cout, std::cerr);
  if (modes_cmd->parsed()) return cmd_modes(config, std::cout, std::cerr);
  if (bvp->parsed()) return cmd_bvp(config, std::cout, std::cerr);
  return cmd_verify(config, std::cout, std::cerr);
}
