#include <gtest/gtest.h>

#include <sstream>

#include "cgf/experiments.hpp"
#include "oracles.hpp"

using namespace cgf;

namespace {

ExperimentConfig small(std::string id, int n_lo, int n_hi, std::size_t reps = 2000) {
  ExperimentConfig c;
  c.id = std::move(id);
  c.n_min = n_lo;
  c.n_max = n_hi;
  c.replications = reps;
  c.seed = 5;
  c.grid_points = 11;
  return c;
}

std::string csv(const ResultTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

}  // namespace

TEST(Experiments, UnknownIdListsValidIds) {
  ExperimentConfig c;
  c.id = "fig99";
  try {
    run_experiment(c);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("progress_vs_cri_auction"), std::string::npos);
  }
}

TEST(Experiments, InvalidParameters) {
  auto c = small("cri_pmf_sta", 2, 3);
  c.range = 0.0;
  EXPECT_THROW(run_experiment(c), DomainError);
  c = small("cri_pmf_auction", 2, 3);
  c.q = 3;
  EXPECT_THROW(run_experiment(c), DomainError);
  c = small("cri_pmf_sta", 5, 3);
  EXPECT_THROW(run_experiment(c), DomainError);
  c = small("cri_pmf_sta", 2, 3);
  c.replications = 0;
  EXPECT_THROW(run_experiment(c), DomainError);
}

TEST(Experiments, StaPmfRows) {
  const auto t = run_experiment(small("cri_pmf_sta", 2, 4));
  EXPECT_DOUBLE_EQ(*t.lookup("analytic_sta", {{"n", 2}, {"k", 3}}), 0.5);
  EXPECT_DOUBLE_EQ(*t.lookup("analytic_sta", {{"n", 2}, {"k", 5}}), 0.25);
  EXPECT_DOUBLE_EQ(*t.lookup("analytic_sta", {{"n", 2}, {"k", 7}}), 0.125);
  const double p9 = *t.lookup("analytic_sta", {{"n", 4}, {"k", 9}});
  EXPECT_NEAR(p9, 69.0 / 256.0, 1e-12);
  EXPECT_NEAR(p9, 0.28, 0.05);
  EXPECT_EQ(t.diagnostics.size(), 3u);
}

TEST(Experiments, AuctionPmfMatchesEnumeration) {
  const auto t = run_experiment(small("cri_pmf_auction", 4, 4));
  const auto plain = oracle::auction_pmf_by_enumeration(4, 0.5, false, 12);
  const auto skip = oracle::auction_pmf_by_enumeration(4, 0.5, true, 12);
  for (int k = 1; k <= 12; ++k) {
    EXPECT_NEAR(*t.lookup("analytic_auction", {{"n", 4}, {"k", k}}), plain[static_cast<std::size_t>(k)], 1e-14);
    EXPECT_NEAR(*t.lookup("analytic_auction_skip", {{"n", 4}, {"k", k}}), skip[static_cast<std::size_t>(k)], 1e-14);
  }
}

TEST(Experiments, ExpectedNearestSingleRelayInSector) {
  const auto t = run_experiment(small("exp_dist_nearest", 1, 4));
  EXPECT_NEAR(*t.lookup("sdr_analytic", {{"n", 1}}), 2.0 / 3.0, 1e-8);
  for (const auto& d : t.diagnostics)
    if (d.kind == "violations") EXPECT_TRUE(d.pass()) << d.name;
}

TEST(Experiments, IterationGainHasNoViolations) {
  const auto t = run_experiment(small("iter_gain_nearest", 2, 6, 500));
  ASSERT_EQ(t.rows.size(), 15u);
  const auto& last = t.diagnostics.back();
  EXPECT_EQ(last.name, "nearest_increases_over_rounds");
  EXPECT_EQ(last.value, 0.0);
}

TEST(Experiments, DistancePdfTableShape) {
  const auto t = run_experiment(small("dist_pdf_cdr", 3, 3));
  EXPECT_EQ(t.rows.size(), 3u * 11u);
  EXPECT_EQ(t.diagnostics.size(), 3u);
  // ccdf at d = R is zero in both columns
  EXPECT_NEAR(*t.lookup("analytic_ccdf", {{"rank", 1}, {"d", 1.0}}), 0.0, 1e-12);
  EXPECT_EQ(*t.lookup("empirical_ccdf", {{"rank", 1}, {"d", 1.0}}), 0.0);
}

TEST(Experiments, ProgressVsCriColumns) {
  const auto t = run_experiment(small("progress_vs_cri_auction", 2, 3));
  EXPECT_NO_THROW(t.column("analytic_mean_cri_auction_skip"));
  EXPECT_NEAR(*t.lookup("analytic_mean_cri_auction", {{"n", 2}}), 3.5, 1e-9);
  EXPECT_NEAR(*t.lookup("analytic_mean_cri_auction_skip", {{"n", 2}}), 3.0, 1e-9);
  const auto s = run_experiment(small("progress_vs_cri_sta", 2, 2));
  EXPECT_NEAR(*s.lookup("analytic_mean_cri_sta", {{"n", 2}}), 5.0, 1e-9);
}

TEST(Experiments, DiagnosticsDecidePass) {
  auto c = small("cri_pmf_sta", 2, 2, 20000);
  c.tv_threshold = 0.05;
  EXPECT_TRUE(run_experiment(c).passed());
  c.tv_threshold = 1e-6;
  EXPECT_FALSE(run_experiment(c).passed());
}

TEST(Experiments, CsvIsDeterministicWithProvenance) {
  const auto c = small("cri_pmf_auction", 2, 3);
  const auto a = csv(run_experiment(c));
  const auto b = csv(run_experiment(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("# experiment: cri_pmf_auction\n", 0), 0u);
  EXPECT_NE(a.find("# config_hash: "), std::string::npos);
  EXPECT_NE(a.find("# seed: 5\n"), std::string::npos);
  EXPECT_NE(a.find("# version: "), std::string::npos);
  EXPECT_NE(a.find("\nn,k,analytic_auction,empirical_auction,analytic_auction_skip,empirical_auction_skip\n"),
            std::string::npos);
  EXPECT_NE(a.find("# diagnostic tv_auction_n2 tv="), std::string::npos);
  auto other = c;
  other.seed = 6;
  const auto t1 = run_experiment(c), t2 = run_experiment(other);
  EXPECT_NE(t1.provenance[2].second, t2.provenance[2].second);
}

TEST(Experiments, ThreadCountDoesNotChangeOutput) {
  auto c = small("cri_pmf_sta", 3, 3);
  const auto a = csv(run_experiment(c));
  c.threads = 3;
  EXPECT_EQ(a, csv(run_experiment(c)));
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(3.0), "3");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
  // FNV-1a 64 reference values
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}
