#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "foq/time_series.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "foqsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = foq::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST(CliAnalyze, DerivedSequence) {
  const Result r = invoke({"analyze", "--k", "0", "--ki", "0.5", "--lambda", "1", "--ropt", "0.5",
                           "--sc", "1.28", "--horizon", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# z1 = 0.5"), std::string::npos);
  EXPECT_NE(r.out.find("# N0 = 0"), std::string::npos);
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "n,rho_closed,rho_recurrence,q_n");
  EXPECT_EQ(rows[1], "0,0.25,0.25,0");
  EXPECT_EQ(rows[2], "1,0.375,0.375,0");
}

TEST(CliAnalyze, UnstableGainsRejected) {
  const Result r = invoke({"analyze", "--k", "0.5", "--ki", "1.0", "--lambda", "1", "--ropt",
                           "0.5", "--sc", "1.28"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("outside stability region 0 < K_I < 2(1-K)"), std::string::npos);
  const Result forced = invoke({"analyze", "--k", "0.5", "--ki", "1.0", "--lambda", "1", "--ropt",
                                "0.5", "--sc", "1.28", "--horizon", "5", "--recurrence"});
  EXPECT_EQ(forced.code, 0) << forced.err;
}

TEST(CliAnalyze, PolesOnly) {
  const Result r = invoke({"analyze", "--k", "0", "--ki", "0.5", "--lambda", "1", "--ropt", "0.5",
                           "--sc", "1.28", "--poles-only"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(data_rows(r.out), (std::vector<std::string>{"0.5,0"}));
}

TEST(CliValidate, GoodAndBadConfigs) {
  EXPECT_EQ(invoke({"validate", std::string(FOQ_CONFIG_DIR) + "/cbr_scaled.cfg"}).code, 0);
  EXPECT_EQ(invoke({"validate", std::string(FOQ_CONFIG_DIR) + "/tcp_scaled.cfg"}).code, 0);
  const auto bad = temp_file("foq_cli_bad.cfg", "switch.ports = 2\nswitch.line_rate = -1Mbps\n");
  const Result r = invoke({"validate", bad.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("switch.line_rate"), std::string::npos);
  EXPECT_NE(r.err.find("experiment.duration"), std::string::npos);
  EXPECT_EQ(invoke({"validate", "/nonexistent/foq.cfg"}).code, 1);
}

TEST(CliRun, WritesCsvAndHonoursSeed) {
  const auto cfg = temp_file("foq_cli_run.cfg", R"(
experiment.duration = 20ms
switch.ports = 2
switch.line_rate = 100Mbps
switch.speedup = 1.28
feedback.mode = gearbox
cbr.a.rate = 150Mbps
cbr.a.packet_size = 15B
cbr.a.flow = 1
cbr.a.ingress = 0
cbr.a.egress = 1
)");
  const auto out = std::filesystem::temp_directory_path() / "foq_cli_run.csv";
  const Result r = invoke({"run", cfg.string(), "--seed", "3", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out);
  const std::string csv((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const foq::TimeSeries ts = foq::TimeSeries::from_csv(csv);
  EXPECT_FALSE(ts.select("throughput", 1, 1).empty());

  const Result to_stdout = invoke({"run", cfg.string(), "--seed", "3", "--out", "-"});
  ASSERT_EQ(to_stdout.code, 0);
  EXPECT_EQ(to_stdout.out.substr(0, csv.size()), csv);
}

TEST(CliRun, ExitCodes) {
  EXPECT_EQ(invoke({"run", "/nonexistent/foq.cfg"}).code, 1);
  EXPECT_NE(invoke({"bogus"}).code, 0);
}
