#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cgf_cli.hpp"

using namespace cgf;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

// Data lines (no comments, no header).
std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.starts_with("#")) continue;
    if (header) {
      header = false;
      continue;
    }
    lines.push_back(line);
  }
  return lines;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cgf_cli_test_" + name);
}

}  // namespace

TEST(Cli, PmfRowsForTwoNodes) {
  const auto r = run({"pmf", "--protocol", "sta", "--n", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = data_lines(r.out);
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows[0], "3,0.5");
  EXPECT_EQ(rows[1], "5,0.25");
  EXPECT_EQ(rows[2], "7,0.125");
  EXPECT_NE(r.out.find("\nk,probability\n"), std::string::npos);
}

TEST(Cli, PmfOverNRange) {
  const auto r = run({"pmf", "--protocol", "auction-skip", "--n", "2..3", "--kmax", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\nn,k,probability\n"), std::string::npos);
  const auto rows = data_lines(r.out);
  EXPECT_EQ(rows.front().substr(0, 4), "2,2,");
  EXPECT_EQ(rows.back().substr(0, 4), "3,4,");
}

TEST(Cli, MedianDistanceInHalfDisk) {
  const auto r = run({"distance", "--region", "sdr", "--aperture", "3.14159265", "--rank", "1", "--of", "5", "--stat",
                      "median"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = data_lines(r.out);
  ASSERT_EQ(rows.size(), 1u);
  const double v = std::stod(rows[0].substr(rows[0].rfind(',') + 1));
  EXPECT_NEAR(v, 0.35982, 1e-4);
}

TEST(Cli, DistanceCcdfAtPoints) {
  const auto r = run({"distance", "--region", "sdr", "--aperture", "2", "--rank", "1", "--of", "1", "--stat", "ccdf",
                      "--d", "0.5", "--d", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = data_lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "0.5,0.75");
  EXPECT_EQ(rows[1], "1,0");
}

TEST(Cli, InvertMatchesPmf) {
  const auto r = run({"invert", "--protocol", "sta", "--n", "2", "--k", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto row = data_lines(r.out).at(0);
  std::vector<double> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(std::stod(c));
  EXPECT_NEAR(cells.at(2), 0.5, 1e-6);
}

TEST(Cli, UsageErrorsAreOneLine) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"pmf", "--bogus"},
           {},
           {"pmf", "--protocol", "tree"},
           {"pmf", "--n", "5..2"},
           {"experiment", "fig42"},
           {"distance", "--rank", "6", "--of", "5", "--stat", "mean"},
           {"distance", "--region", "cdr", "--aperture", "1"},
           {"simulate", "--n", "2..3"}}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 2) << (args.empty() ? "" : args[0]);
    EXPECT_TRUE(r.err.starts_with("error kind=usage code=2 message=\"")) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
  }
}

TEST(Cli, ResourceLimitExitCode) {
  const auto r = run({"pmf", "--protocol", "sta", "--n", "400", "--q", "6"});
  EXPECT_EQ(r.code, 4);
  EXPECT_TRUE(r.err.starts_with("error kind=resource code=4")) << r.err;
}

TEST(Cli, ValidationFailureExitCode) {
  const auto r = run({"experiment", "cri_pmf_sta", "--n", "2", "--reps", "500", "--tv-threshold", "1e-9"});
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(r.err.starts_with("error kind=validation code=3")) << r.err;
  EXPECT_NE(r.out.find("# diagnostic tv_sta_n2 tv="), std::string::npos);
}

TEST(Cli, ExperimentPassesAndWritesFile) {
  const auto path = temp_path("exp.csv");
  const auto r = run({"experiment", "exp_dist_nearest", "--n", "1..3", "--seed", "3", "-o",
                      path.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto text = slurp(path);
  EXPECT_NE(text.find("# experiment: exp_dist_nearest\n"), std::string::npos);
  EXPECT_NE(text.find("n,sdr_analytic,"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, SimulateIsBitIdenticalAcrossRunsAndThreads) {
  const auto a = temp_path("a.jsonl"), b = temp_path("b.jsonl");
  std::vector<std::string> base{"simulate", "--protocol", "auction", "--n", "5", "--reps", "2000", "--seed", "11",
                                "--format", "records", "-o"};
  auto args_a = base;
  args_a.push_back(a.string());
  auto args_b = base;
  args_b.push_back(b.string());
  args_b.insert(args_b.end(), {"--threads", "3"});
  ASSERT_EQ(run(args_a).code, 0);
  ASSERT_EQ(run(args_b).code, 0);
  const auto ta = slurp(a);
  EXPECT_EQ(ta, slurp(b));
  EXPECT_EQ(std::count(ta.begin(), ta.end(), '\n'), 2000);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Cli, SimulateCsvSummary) {
  const auto r = run({"simulate", "--protocol", "sta", "--n", "3", "--reps", "10", "--seed", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# mean_slots: "), std::string::npos);
  EXPECT_EQ(data_lines(r.out).size(), 10u);
}

TEST(Cli, SeedFromEnvironment) {
  const std::vector<std::string> args{"simulate", "--n", "3", "--reps", "5", "--format", "records"};
  ::setenv("CGF_SEED", "77", 1);
  const auto env = run(args);
  ::unsetenv("CGF_SEED");
  auto explicit_args = args;
  explicit_args.insert(explicit_args.end(), {"--seed", "77"});
  const auto flag = run(explicit_args);
  const auto dflt = run(args);
  EXPECT_EQ(env.out, flag.out);
  EXPECT_NE(env.out, dflt.out);
}

TEST(Cli, ConfigFile) {
  const auto cfg = temp_path("cfg.toml");
  {
    std::ofstream f(cfg);
    f << "[pmf]\nprotocol = \"sta\"\nn = \"2\"\n";
  }
  const auto from_file = run({"--config", cfg.string(), "pmf"});
  const auto from_flags = run({"pmf", "--protocol", "sta", "--n", "2"});
  EXPECT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out, from_flags.out);
  std::filesystem::remove(cfg);
}

TEST(Cli, ValidateIsDeterministic) {
  const std::vector<std::string> args{"validate", "--n", "2..3", "--reps", "3000", "--seed", "7",
                                      "--tv-threshold", "0.05", "--ks-threshold", "0.05"};
  const auto a = run(args);
  const auto b = run(args);
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("\nn,tv_sta,tv_auction,tv_auction_skip,ks_sdr_max,ks_cdr_max\n"), std::string::npos);
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("experiment"), std::string::npos);
  const auto sub = run({"distance", "--help"});
  EXPECT_EQ(sub.code, 0);
  EXPECT_NE(sub.out.find("--stat"), std::string::npos);
}

TEST(Cli, NRangeParsing) {
  EXPECT_EQ(cli::parse_n_range("4").lo, 4);
  const auto r = cli::parse_n_range("2..10");
  EXPECT_EQ(r.lo, 2);
  EXPECT_EQ(r.hi, 10);
  EXPECT_THROW(cli::parse_n_range("2..x"), DomainError);
  EXPECT_THROW(cli::parse_n_range(""), DomainError);
  EXPECT_THROW(cli::parse_n_range("-1"), DomainError);
}
