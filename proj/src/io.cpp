#include "warped/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include <fmt/core.h>
#include <fmt/ostream.h>

namespace warped {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("line {}: '{}' is not a number", line, s));
  }
}

// Rows of numbers under a header that must match `expected`.
std::vector<std::vector<double>> read_table(std::istream& is,
                                            const std::vector<std::string>& expected) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cells = split_csv(t);
    if (!header) {
      if (cells != expected) {
        throw ParseError(fmt::format("line {}: expected header '{}'", lineno,
                                     fmt::join(expected, ",")));
      }
      header = true;
      continue;
    }
    if (cells.size() != expected.size()) {
      throw ParseError(fmt::format("line {}: expected {} columns", lineno, expected.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, lineno));
    rows.push_back(std::move(row));
  }
  if (!header) throw ParseError("missing CSV header");
  return rows;
}

}  // namespace

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

void write_profile_csv(std::ostream& os, const MetricProfile& profile, const RadialGrid& grid) {
  fmt::print(os, "r,phi,phi_prime,K\n");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    if (r == 0.0) {
      fmt::print(os, "0,0,1,{:.17g}\n", profile.curvature(std::min(1e-8, profile.r_max())));
      continue;
    }
    fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g}\n", r, profile.phi(r),
               profile.phi_prime(r), profile.curvature(r));
  }
}

void write_mode_csv(std::ostream& os, const BiharmonicMode& mode) {
  fmt::print(os, "r,lambda_m,z,log_psi_m,err_bound\n");
  for (Eigen::Index i = 0; i < mode.grid.size(); ++i) {
    fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", mode.grid[i], mode.lambda[i],
               mode.z[i], mode.log_psi[i], mode.error[i]);
  }
}

void write_residual_csv(std::ostream& os, const RadialGrid& grid,
                        const Eigen::VectorXd& interior) {
  if (interior.size() + 2 != grid.size()) {
    throw std::invalid_argument("residual CSV: expected one value per interior node");
  }
  fmt::print(os, "r,residual\n");
  for (Eigen::Index i = 0; i < interior.size(); ++i) {
    fmt::print(os, "{:.17g},{:.17g}\n", grid[i + 1], interior[i]);
  }
}

void write_evidence_csv(std::ostream& os, const NumericEvidence& evidence) {
  fmt::print(os, "m,phi_m_verdict,z_verdict,ratio_slope\n");
  for (const auto& e : evidence.modes) {
    fmt::print(os, "{},{},{},{:.17g}\n", e.m, to_string(e.phi_m), to_string(e.z),
               e.ratio_slope);
  }
}

void write_coefficients_csv(std::ostream& os, const ModeCoefficients& coeffs) {
  fmt::print(os, "m,re_c,im_c,re_d,im_d\n");
  for (const auto& c : coeffs.modes) {
    const auto cv = c.c_value();
    const auto dv = c.d_value();
    fmt::print(os, "{},{:.17g},{:.17g},{:.17g},{:.17g}\n", c.m, cv.real(), cv.imag(),
               dv.real(), dv.imag());
  }
}

void write_report(std::ostream& os, const ClassificationReport& rep, const std::string& name) {
  auto kv = [&](const std::string& k, const std::string& v) { fmt::print(os, "{} = {}\n", k, v); };
  kv("profile", name);
  kv("horizon", format_double(rep.horizon));
  kv("harmonic", to_string(rep.harmonic));
  kv("biharmonic", to_string(rep.biharmonic));
  kv("route", to_string(rep.route));
  kv("conflict", rep.conflict ? "true" : "false");
  kv("harmonic_by_tail", to_string(rep.harmonic_by_tail));
  kv("biharmonic_by_tail", to_string(rep.biharmonic_by_tail));
  kv("harmonic_by_evidence", to_string(rep.harmonic_by_evidence));
  kv("biharmonic_by_evidence", to_string(rep.biharmonic_by_evidence));
  kv("tail_source", to_string(rep.tail_source));
  if (rep.tail) {
    kv("tail_class", to_string(rep.tail->cls));
    kv("tail_eps", format_double(rep.tail->eps));
    kv("tail_eta", format_double(rep.tail->eta));
    kv("tail_r0", format_double(rep.tail->r0));
  }
  if (rep.tail_check) {
    kv("tail_verified", rep.tail_check->holds ? "true" : "false");
    kv("tail_samples", std::to_string(rep.tail_check->samples));
    if (!rep.tail_check->holds) kv("tail_first_violation", format_double(rep.tail_check->first_violation));
  }
  if (rep.fit) {
    kv("fit_classifiable", rep.fit->classifiable ? "true" : "false");
    kv("fit_power_exponent", format_double(rep.fit->power_exponent));
    kv("fit_power_residual", format_double(rep.fit->power_residual));
    if (rep.fit->log_coefficient) kv("fit_log_coefficient", format_double(*rep.fit->log_coefficient));
    if (rep.fit->log_residual) kv("fit_log_residual", format_double(*rep.fit->log_residual));
    if (!rep.fit->note.empty()) kv("fit_note", rep.fit->note);
  }
  const auto& ev = rep.evidence;
  kv("log_derivative_last", format_double(ev.log_derivative.last));
  kv("log_derivative_limit", format_double(ev.log_derivative.extrapolated));
  kv("log_derivative_monotone", ev.log_derivative.monotone ? "true" : "false");
  kv("mean_integral_ratio_slope", format_double(ev.ratio_slope));
  kv("phi_growth", to_string(ev.phi_growth));
  kv("phi_nondecreasing", ev.phi_nondecreasing ? "true" : "false");
  for (const auto& e : ev.modes) {
    kv(fmt::format("mode.{}.phi_m", e.m), to_string(e.phi_m));
    kv(fmt::format("mode.{}.z", e.m), to_string(e.z));
    kv(fmt::format("mode.{}.ratio_slope", e.m), format_double(e.ratio_slope));
    kv(fmt::format("mode.{}.w_max", e.m), format_double(e.w_max));
  }
}

BoundaryTrace read_trace_csv(std::istream& is, double radius) {
  const auto rows = read_table(is, {"theta", "u", "lap_u"});
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  BoundaryTrace t{radius, Eigen::VectorXcd(n), Eigen::VectorXcd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const double expected = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
    if (std::abs(rows[k][0] - expected) > 1e-9) {
      throw ParseError(fmt::format("trace row {}: theta = {} but expected {} (equispaced from 0)",
                                   k, rows[k][0], expected));
    }
    t.u[k] = rows[k][1];
    t.lap_u[k] = rows[k][2];
  }
  t.validate();
  return t;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> read_curvature_csv(std::istream& is) {
  const auto rows = read_table(is, {"r", "K"});
  if (rows.size() < 3) throw ParseError("curvature table needs >= 3 rows");
  Eigen::VectorXd r(rows.size()), k(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    r[i] = rows[i][0];
    k[i] = rows[i][1];
    if (i > 0 && !(r[i] > r[i - 1])) throw ParseError("curvature table: r must increase");
  }
  return {r, k};
}

KeyValueFile KeyValueFile::parse(std::istream& is) {
  KeyValueFile f;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(fmt::format("line {}: unterminated section", lineno));
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError(fmt::format("line {}: expected 'key = value'", lineno));
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ParseError(fmt::format("line {}: empty key", lineno));
    f.entries_[section.empty() ? key : section + "." + key] = trim(t.substr(eq + 1));
  }
  return f;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  return parse(in);
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double parse_double(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(fmt::format("'{}' is not a number", text));
}

long parse_long(const std::string& text) {
  const double v = parse_double(text);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw ParseError(fmt::format("'{}' is not an integer", text));
  }
  return static_cast<long>(v);
}

std::optional<double> KeyValueFile::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_double(*v);
}

std::optional<long> KeyValueFile::get_long(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_long(*v);
}

}  // namespace warped
