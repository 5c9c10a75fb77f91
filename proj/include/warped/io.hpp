#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "warped/asymptotics.hpp"
#include "warped/bvp.hpp"
#include "warped/geometry.hpp"
#include "warped/modes.hpp"

namespace warped {

/// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV writers. Numbers are written with 17 significant digits.
void write_profile_csv(std::ostream& os, const MetricProfile& profile, const RadialGrid& grid);
void write_mode_csv(std::ostream& os, const BiharmonicMode& mode);
/// Interior nodes only, matching the residual vector of verify_mode_residuals.
void write_residual_csv(std::ostream& os, const RadialGrid& grid, const Eigen::VectorXd& interior);
void write_evidence_csv(std::ostream& os, const NumericEvidence& evidence);
void write_coefficients_csv(std::ostream& os, const ModeCoefficients& coeffs);
void write_report(std::ostream& os, const ClassificationReport& report, const std::string& name);

/// `theta,u,lap_u` rows at theta_k = 2 pi k / N.
BoundaryTrace read_trace_csv(std::istream& is, double radius);
/// `r,K` rows, strictly increasing r.
std::pair<Eigen::VectorXd, Eigen::VectorXd> read_curvature_csv(std::istream& is);

/// Flat key-value text: `key = value`, `#` comments and `[section]` headers.
/// Keys are stored as `section.key` (or bare `key` before any header).
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& is);
  static KeyValueFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long> get_long(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

std::string format_double(double value);
/// Whole-string numeric parses; ParseError otherwise.
double parse_double(const std::string& text);
long parse_long(const std::string& text);

}  // namespace warped
