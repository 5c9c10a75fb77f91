#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "warped/cli.hpp"
#include "warped/io.hpp"

namespace warped {
namespace {

namespace fs = std::filesystem;

// Fresh scratch directory per test, removed afterwards.
class ScratchDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("warped_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string slurp(const fs::path& p) const {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
  }
  void write(const fs::path& p, const std::string& text) const {
    std::ofstream(p, std::ios::binary) << text;
  }

  fs::path dir_;
};

TEST(KeyValueFile, SectionsAndComments) {
  std::istringstream is("# run setup\nhorizon = 50\n[profile]\nfamily = hyperbolic  # inline\n"
                        "eps=0.25\n");
  const auto kv = KeyValueFile::parse(is);
  EXPECT_EQ(kv.get_double("horizon"), 50.0);
  EXPECT_EQ(kv.get("profile.family"), "hyperbolic");
  EXPECT_EQ(kv.get_double("profile.eps"), 0.25);
  EXPECT_FALSE(kv.get("profile.eta").has_value());
}

TEST(KeyValueFile, MalformedInput) {
  std::istringstream no_equals("[run]\nhorizon 50\n");
  EXPECT_THROW(KeyValueFile::parse(no_equals), ParseError);
  std::istringstream bad_number("horizon = 5o\n");
  EXPECT_THROW(KeyValueFile::parse(bad_number).get_double("horizon"), ParseError);
  EXPECT_THROW(parse_long("3.5"), ParseError);
}

TEST(RunConfig, ApplyAndValidate) {
  std::istringstream is("[profile]\nfamily = log-threshold\neps = 0.5\n[run]\nhorizon = 40\n"
                        "mmax = 3\n[bvp]\nradius = 2\n");
  cli::RunConfig config;
  config.apply(KeyValueFile::parse(is));
  EXPECT_EQ(config.family, "log-threshold");
  EXPECT_EQ(config.params.eps, 0.5);
  EXPECT_EQ(config.horizon, 40.0);
  EXPECT_EQ(config.m_max, 3);
  EXPECT_EQ(config.radius, 2.0);
  EXPECT_NO_THROW(config.validate());

  std::istringstream unknown("[run]\ncolour = blue\n");
  EXPECT_THROW(config.apply(KeyValueFile::parse(unknown)), cli::UsageError);

  config.r_max = 10.0;
  EXPECT_THROW(config.validate(), cli::UsageError);
  config.r_max.reset();
  config.family = "sphere";
  EXPECT_THROW(config.validate(), cli::UsageError);
}

TEST(TraceCsv, ReadsEquispacedRows) {
  std::ostringstream os;
  os << "theta,u,lap_u\n";
  for (int k = 0; k < 8; ++k) os << format_double(2.0 * M_PI * k / 8) << ",1,0\n";
  std::istringstream is(os.str());
  const auto trace = read_trace_csv(is, 1.5);
  EXPECT_EQ(trace.size(), 8);
  EXPECT_EQ(trace.radius, 1.5);
  EXPECT_EQ(trace.u[3], std::complex<double>(1.0, 0.0));
}

TEST(TraceCsv, RejectsBadInput) {
  std::istringstream header("angle,u,lap_u\n0,1,0\n");
  EXPECT_THROW(read_trace_csv(header, 1.0), ParseError);
  std::istringstream spacing("theta,u,lap_u\n0,1,0\n1,1,0\n2,1,0\n3,1,0\n");
  EXPECT_THROW(read_trace_csv(spacing, 1.0), ParseError);
  std::istringstream cells("theta,u,lap_u\n0,1\n");
  EXPECT_THROW(read_trace_csv(cells, 1.0), ParseError);
}

TEST(CurvatureCsv, RequiresIncreasingRadii) {
  std::istringstream good("r,K\n0,-1\n1,-1\n2,-1\n");
  const auto [r, k] = read_curvature_csv(good);
  EXPECT_EQ(r.size(), 3);
  EXPECT_EQ(k[1], -1.0);
  std::istringstream bad("r,K\n0,-1\n2,-1\n1,-1\n");
  EXPECT_THROW(read_curvature_csv(bad), ParseError);
}

TEST(ProfileCsv, HeaderAndOriginRow) {
  const auto p = builtin_surface("euclidean", {}, 2.0).profile;
  std::ostringstream os;
  write_profile_csv(os, p, RadialGrid::uniform(0.0, 2.0, 3));
  EXPECT_EQ(os.str(), "r,phi,phi_prime,K\n0,0,1,0\n1,1,1,0\n2,2,1,0\n");
}

TEST(FormatDouble, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
}

TEST_F(ScratchDir, ProfilesListsEveryFamily) {
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_profiles(out), cli::kOk);
  for (const auto& name : builtin_names()) EXPECT_NE(out.str().find(name), std::string::npos);
}

TEST_F(ScratchDir, ClassifyEuclidean) {
  cli::RunConfig config;
  config.out = dir_;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_classify(config, out, err), cli::kOk) << err.str();
  EXPECT_NE(out.str().find("parabolic"), std::string::npos);
  EXPECT_NE(out.str().find("rigid"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "classification.txt"), out.str());
  EXPECT_TRUE(fs::exists(dir_ / "evidence.csv"));
}

TEST_F(ScratchDir, ClassifyUsageErrors) {
  cli::RunConfig config;
  config.out = dir_;
  config.family = "sphere";
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_classify(config, out, err), cli::kUsage);
  config.family = "tabulated";
  config.curvature_file = dir_ / "missing.csv";
  EXPECT_EQ(cli::cmd_classify(config, out, err), cli::kUsage);
}

TEST_F(ScratchDir, ClassifyShortTabulatedTableIsUndetermined) {
  std::string table = "r,K\n";
  for (int i = 0; i <= 30; ++i) table += std::to_string(0.5 * i) + ",-1\n";
  write(dir_ / "k.csv", table);
  cli::RunConfig config;
  config.out = dir_;
  config.family = "tabulated";
  config.curvature_file = dir_ / "k.csv";
  config.horizon = 15.0;
  config.m_max = 2;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_classify(config, out, err), cli::kUndetermined) << err.str();
  config.horizon = 20.0;
  EXPECT_EQ(cli::cmd_classify(config, out, err), cli::kUsage);
}

TEST_F(ScratchDir, ModesFilesMatchPowers) {
  cli::RunConfig config;
  config.out = dir_;
  config.horizon = 10.0;
  config.m_max = 2;
  config.grid = 33;
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_modes(config, out, err), cli::kOk) << err.str();
  for (int m = 0; m <= 2; ++m) {
    std::istringstream csv(slurp(dir_ / ("mode_" + std::to_string(m) + ".csv")));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "r,lambda_m,z,log_psi_m,err_bound");
    int rows = 0;
    while (std::getline(csv, line)) {
      std::istringstream cells(line);
      std::string r, lambda;
      std::getline(cells, r, ',');
      std::getline(cells, lambda, ',');
      const double rv = parse_double(r);
      EXPECT_NEAR(std::exp(parse_double(lambda)) / std::pow(rv, m), 1.0, 1e-8) << rv;
      ++rows;
    }
    EXPECT_EQ(rows, 33);
    EXPECT_TRUE(fs::exists(dir_ / ("residual_" + std::to_string(m) + ".csv")));
  }
  EXPECT_TRUE(fs::exists(dir_ / "profile.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "mode_3.csv"));
}

TEST_F(ScratchDir, BvpConstantAndQuarterRSquaredTraces) {
  auto trace_file = [&](const std::string& name, double u, double lap) {
    std::string text = "theta,u,lap_u\n";
    for (int k = 0; k < 16; ++k) {
      text += format_double(2.0 * M_PI * k / 16) + "," + format_double(u) + "," +
              format_double(lap) + "\n";
    }
    write(dir_ / name, text);
    return dir_ / name;
  };
  cli::RunConfig config;
  config.out = dir_;
  config.trace = trace_file("const.csv", 1.0, 0.0);
  config.truncation = 4;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_bvp(config, out, err), cli::kOk) << err.str();
  EXPECT_NE(slurp(dir_ / "coefficients.csv").find("0,1,0,0,0\n"), std::string::npos);

  config.trace = trace_file("quarter.csv", 0.25, 1.0);
  EXPECT_EQ(cli::cmd_bvp(config, out, err), cli::kOk) << err.str();
  EXPECT_NE(slurp(dir_ / "coefficients.csv").find("0,0,0,1,0\n"), std::string::npos);

  config.trace.reset();
  EXPECT_EQ(cli::cmd_bvp(config, out, err), cli::kUsage);
}

TEST_F(ScratchDir, VerifyIsDeterministic) {
  cli::RunConfig config;
  config.horizon = 100.0;
  config.out = dir_ / "a";
  fs::create_directories(config.out);
  std::ostringstream out_a, out_b, err;
  ASSERT_EQ(cli::cmd_verify(config, out_a, err), cli::kOk) << out_a.str() << err.str();
  config.out = dir_ / "b";
  fs::create_directories(config.out);
  ASSERT_EQ(cli::cmd_verify(config, out_b, err), cli::kOk);
  EXPECT_EQ(out_a.str(), out_b.str());
  EXPECT_EQ(slurp(dir_ / "a" / "verify.txt"), slurp(dir_ / "b" / "verify.txt"));
}

TEST_F(ScratchDir, VerifyFaultAndInfeasibleTolerance) {
  cli::RunConfig config;
  config.horizon = 100.0;
  config.out = dir_;
  config.inject_fault = "phi-second";
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(config, out, err), cli::kFailed);
  EXPECT_NE(out.str().find("[FAIL] stencil"), std::string::npos) << out.str();

  config.inject_fault.clear();
  config.step.rel_tol = 1e-16;
  std::ostringstream out2;
  EXPECT_EQ(cli::cmd_verify(config, out2, err), cli::kInfeasible);
  EXPECT_NE(out2.str().find("tolerance-infeasible"), std::string::npos);
}

}  // namespace
}  // namespace warped
