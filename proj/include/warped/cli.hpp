#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "warped/geometry.hpp"
#include "warped/io.hpp"

namespace warped::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailed = 1,        // verify suite failure, bvp boundary mismatch
  kUndetermined = 2,  // classify: no determinate label
  kInfeasible = 2,    // verify: tolerance below double precision
  kUsage = 64,
  kNumeric = 70,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // Profile: a built-in family, or `tabulated` with a curvature CSV.
  std::string family = "euclidean";
  std::string name;  // defaults to the family
  BuiltinParams params;
  std::optional<std::filesystem::path> curvature_file;
  std::optional<TailDescriptor> tail;  // declared tail of a tabulated curvature
  std::optional<double> r_max;         // defaults to the horizon (or the BVP radius)
  StepControl step;

  // Classification and modes.
  double horizon = 1e3;
  int m_max = 8;  // m ranges over [-m_max, m_max]
  Eigen::Index grid = 257;
  double first_radius = 0.01;

  // BVP.
  std::optional<std::filesystem::path> trace;
  double radius = 1.0;
  int truncation = 32;
  double boundary_tol = 1e-8;

  std::filesystem::path out = ".";
  std::uint64_t seed = 1;
  std::string inject_fault;  // verify only: "phi-second"

  std::string display_name() const { return name.empty() ? family : name; }
  /// Radius the metric is integrated to.
  double profile_extent() const;
  /// Throws UsageError when an invariant fails.
  void validate() const;
  /// Overlay `[profile]`, `[run]` and `[bvp]` entries onto this config.
  void apply(const KeyValueFile& file);
};

/// Smallest relative tolerance the integrators can honour.
inline constexpr double kMinTolerance = 1e-15;

Surface make_surface(const RunConfig& config);

int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_modes(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bvp(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_profiles(std::ostream& out);

}  // namespace warped::cli
