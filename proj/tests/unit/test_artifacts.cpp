#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "aqcrl/artifacts.hpp"

using namespace aqcrl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("aqcrl_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + v[k];
  return s;
}

}  // namespace

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(497.8), "497.8");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
}

TEST(ArtifactProperty, FormatNumberRoundTrips) {
  Rng rng(41);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 20000) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    ASSERT_EQ(std::strtod(format_number(v).c_str(), nullptr), v) << format_number(v);
    ++checked;
  }
}

// The plotting scripts read these exact headers.
TEST(Columns, FrozenSchemas) {
  EXPECT_EQ(join(columns::fidelity), "n,T,schedule_kind,success_probability");
  EXPECT_EQ(join(columns::sat_success), "n_bits,n_clauses,T,schedule_kind,samples,unsatisfiable,mean_success,bootstrap_se");
  EXPECT_EQ(join(columns::sat_instances), "n_clauses,sample_index,success,unsatisfiable");
  EXPECT_EQ(join(columns::spectrum),
            "t_over_T,E0,E1,E_dyn_linear,E_dyn_rl,E_dyn_nonlinear,s_linear,s_rl,s_nonlinear,E0_rl,E1_rl,E0_nonlinear,"
            "E1_nonlinear");
  EXPECT_EQ(join(columns::infidelity), "n_clauses,sample_index,infidelity");
  EXPECT_EQ(join(columns::infidelity_stats),
            "n_clauses,samples,unsatisfiable,mean_infidelity,second_moment,bootstrap_se,wd_second_moment,"
            "relative_difference,ks_goe");
  EXPECT_EQ(join(columns::infidelity_hist), "n_clauses,bin_lo,bin_hi,density");
  EXPECT_EQ(join(columns::schedule_curve), "x,s_linear,s_rl,s_nonlinear");
  EXPECT_EQ(join(columns::transfer), "n,T,infidelity_rl,infidelity_linear");
  EXPECT_EQ(join(columns::trace),
            "j,i,step,proposed_action,action,delta,reward,epsilon,temperature,loss,training,target_refreshed");
}

TEST(CsvWriter, WritesHeaderAndRows) {
  const auto dir = scratch_dir("csv");
  {
    CsvWriter w(dir / "f.csv", columns::fidelity);
    w.cell(4).cell(62.2).cell(std::string("linear")).cell(0.96).end_row();
    w.cell(4);
    EXPECT_THROW(w.end_row(), StructuralError);
  }
  const auto lines = read_lines(dir / "f.csv");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "n,T,schedule_kind,success_probability");
  EXPECT_EQ(lines[1], "4,62.2,linear,0.96");
  EXPECT_THROW(CsvWriter(dir / "missing" / "x.csv", columns::fidelity), Error);
  fs::remove_all(dir);
}

TEST(TraceCsv, OneRowPerStepWithCoefficients) {
  const auto dir = scratch_dir("trace");
  TraceRow r;
  r.j = 1;
  r.i = 2;
  r.step = 2;
  r.proposed_action = 3;
  r.action = 0;
  r.delta = 0.05;
  r.reward = 0.5;
  r.epsilon = 0.02;
  r.temperature = 7.943282347242815;
  r.b = {0, 0, 0, 0, 0, 0.1};
  write_trace_csv(dir / "trace.csv", {r}, 6);
  const auto lines = read_lines(dir / "trace.csv");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], join(columns::trace) + ",b1,b2,b3,b4,b5,b6");
  EXPECT_EQ(lines[1], "1,2,2,3,0,0.05,0.5,0.02,7.943282347242815,nan,1,0,0,0,0,0,0,0.1");
  fs::remove_all(dir);
}

TEST(WignerDysonConstants, SidecarContents) {
  const auto j = wigner_dyson_constants();
  EXPECT_EQ(j.at("format_version"), kArtifactFormatVersion);
  EXPECT_EQ(j.at("reference"), "goe");
  const auto& goe = j.at("ensembles").at("goe");
  EXPECT_DOUBLE_EQ(goe.at("prefactor").get<double>(), std::numbers::pi / 2);
  EXPECT_EQ(goe.at("power").get<int>(), 1);
  EXPECT_DOUBLE_EQ(goe.at("exponent").get<double>(), std::numbers::pi / 4);
  EXPECT_DOUBLE_EQ(goe.at("second_moment").get<double>(), 4 / std::numbers::pi);
  const auto& gue = j.at("ensembles").at("gue");
  EXPECT_DOUBLE_EQ(gue.at("prefactor").get<double>(), 32 / (std::numbers::pi * std::numbers::pi));
  EXPECT_EQ(gue.at("power").get<int>(), 2);
  EXPECT_DOUBLE_EQ(gue.at("exponent").get<double>(), 4 / std::numbers::pi);
  // The sidecar alone reproduces the density.
  for (double x : {0.3, 1.0, 2.2}) {
    const double a = goe.at("prefactor"), b = goe.at("exponent");
    EXPECT_NEAR(a * x * std::exp(-b * x * x), wigner_dyson_pdf(x), 1e-15);
  }
}

TEST(Json, RoundTripAndParseErrors) {
  const auto dir = scratch_dir("json");
  write_json(dir / "a.json", {{"x", 0.1}, {"y", {1, 2}}});
  EXPECT_EQ(read_json(dir / "a.json").at("x").get<double>(), 0.1);
  {
    std::ofstream(dir / "bad.json") << "{\"x\": 1,\n \"y\": }";
  }
  try {
    read_json(dir / "bad.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GT(e.position(), 10u);
  }
  EXPECT_THROW(read_json(dir / "none.json"), Error);
  fs::remove_all(dir);
}
