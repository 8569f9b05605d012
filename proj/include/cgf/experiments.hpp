#pragma once

// Figure-family experiments. Each one produces the analytic series and the
// Monte Carlo series side by side, plus agreement diagnostics; a table passes
// when every diagnostic is within its threshold.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cgf/batch.hpp"
#include "cgf/distance.hpp"
#include "cgf/pgf.hpp"
#include "cgf/stats.hpp"

namespace cgf {

inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr std::array<std::string_view, 10> kExperimentIds{
    "cri_pmf_sta",        "cri_pmf_auction",    "dist_pdf_sdr",       "dist_pdf_cdr",        "iter_gain_nearest",
    "iter_gain_furthest", "exp_dist_nearest",   "exp_dist_furthest",  "progress_vs_cri_sta", "progress_vs_cri_auction"};

struct ExperimentConfig {
  std::string id;
  std::optional<int> n_min;  // unset: per-experiment default
  std::optional<int> n_max;
  int q = 2;
  double p = 0.5;  // probability of the first splitting group
  double range = 1.0;
  std::optional<double> rho;       // default: range
  std::optional<double> aperture;  // SDR; default: calibrated from the lens
  std::size_t replications = 100000;
  std::uint64_t seed = 1;
  double tv_threshold = 0.01;
  double ks_threshold = 0.01;
  double z_threshold = 4.0;  // |mean error| in standard errors
  int grid_points = 101;
  unsigned threads = 1;  // results do not depend on it
};

struct Diagnostic {
  std::string name;
  std::string kind;  // tv, ks, z or violations
  double value = 0.0;
  double threshold = 0.0;
  bool pass() const { return value <= threshold; }
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<Diagnostic> diagnostics;

  bool passed() const {
    return std::all_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) { return d.pass(); });
  }

  std::size_t column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DomainError("no column named " + std::string(name));
    return static_cast<std::size_t>(it - columns.begin());
  }

  // Value of `col` in the first row whose `key` column equals each given value.
  std::optional<double> lookup(std::string_view col, std::vector<std::pair<std::string_view, double>> keys) const {
    const auto c = column(col);
    for (const auto& row : rows) {
      bool match = true;
      for (const auto& [k, v] : keys) match = match && row[column(k)] == v;
      if (match) return row[c];
    }
    return std::nullopt;
  }
};

// Shortest round-trip representation; identical bytes for identical doubles.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, 16);
  std::string s(buf, res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

inline void write_csv(std::ostream& os, const ResultTable& t) {
  for (const auto& [k, v] : t.provenance) os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  for (const auto& d : t.diagnostics)
    os << "# diagnostic " << d.name << " " << d.kind << "=" << format_number(d.value)
       << " threshold=" << format_number(d.threshold) << (d.pass() ? " pass" : " FAIL") << '\n';
}

namespace detail {

struct NRange {
  int lo;
  int hi;
};

inline NRange default_n_range(std::string_view id) {
  if (id.starts_with("cri_pmf") || id == "validate") return {2, 5};
  if (id.starts_with("dist_pdf")) return {5, 5};
  if (id.starts_with("exp_dist")) return {1, 10};
  return {2, 10};
}

inline std::string canonical(const ExperimentConfig& c, NRange n) {
  std::string s = "id=" + c.id + ";n=" + std::to_string(n.lo) + ".." + std::to_string(n.hi) +
                  ";q=" + std::to_string(c.q) + ";p=" + format_number(c.p) + ";R=" + format_number(c.range) +
                  ";rho=" + format_number(c.rho.value_or(c.range)) +
                  ";aperture=" + (c.aperture ? format_number(*c.aperture) : std::string("calibrated")) +
                  ";reps=" + std::to_string(c.replications) + ";seed=" + std::to_string(c.seed) +
                  ";tv=" + format_number(c.tv_threshold) + ";ks=" + format_number(c.ks_threshold) +
                  ";z=" + format_number(c.z_threshold) + ";grid=" + std::to_string(c.grid_points);
  return s;
}

inline std::string column_tag(Algorithm a) {
  std::string s(to_string(a));
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

// Source at the origin, destination along +x.
struct Scene {
  Point2 source{0.0, 0.0};
  Point2 destination;
  LensRegion cdr;
  SectorRegion sdr;
};

inline Scene make_scene(const ExperimentConfig& c) {
  Scene s;
  s.destination = {3.0 * c.range, 0.0};
  s.cdr = make_lens(s.source, s.destination, c.range, c.rho.value_or(c.range));
  s.sdr = c.aperture ? make_sector(s.source, s.destination, c.range, *c.aperture) : calibrate_sdr(s.cdr);
  return s;
}

inline SplitModel sta_model(const ExperimentConfig& c, int n) {
  if (c.q == 2) return SplitModel::binary(n, c.p);
  return SplitModel::fair(n, c.q);
}

inline void check_config(const ExperimentConfig& c, NRange n) {
  if (!(c.range > 0.0)) throw DomainError("range must be > 0");
  if (c.replications < 1) throw DomainError("replications must be >= 1");
  if (n.lo < 0 || n.hi < n.lo) throw DomainError("invalid N range");
  if (c.q < 2) throw DomainError("Q must be >= 2");
  if (!(c.p > 0.0 && c.p < 1.0)) throw DomainError("p must lie in (0,1)");
  if (c.q != 2 && c.p != 0.5) throw DomainError("p applies to binary splitting only (Q = 2)");
  if (c.grid_points < 2) throw DomainError("grid must have at least 2 points");
}

inline void check_auction(const ExperimentConfig& c) {
  if (c.q != 2 || c.p != 0.5) throw DomainError("auction experiments use binary equal-mass bands (Q = 2, p = 0.5)");
}

inline EpisodeConfig episode(const ExperimentConfig& c, const Scene& s, Algorithm a, int n, DecisionRegion region) {
  EpisodeConfig e;
  e.protocol = a;
  e.n = n;
  e.q = c.q;
  e.p = sta_model(c, n).p;
  e.region = std::move(region);
  e.destination = s.destination;
  return e;
}

// Rank distances of `reps` BPP draws of n points; [r] = samples of the (r+1)-th nearest.
inline std::vector<std::vector<double>> sample_rank_distances(const DecisionRegion& region, Point2 dest, int n,
                                                              std::size_t reps, std::uint64_t seed) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n));
  for (auto& v : out) v.reserve(reps);
  std::vector<double> d;
  for (std::size_t i = 0; i < reps; ++i) {
    const auto topo = sample_topology(region, dest, n, derive_seed(seed, i));
    d.clear();
    for (const auto& r : topo.relays) d.push_back(distance(r.position, topo.source));
    std::sort(d.begin(), d.end());
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)].push_back(d[static_cast<std::size_t>(k)]);
  }
  return out;
}

inline double rank_ks(const DecisionRegion& region, int rank, int n, const std::vector<double>& sample) {
  return ks_statistic(sample, [&](double d) { return 1.0 - nth_neighbor_ccdf(region, rank, n, d); });
}

// First k at which the analytic CDF reaches the TV cut.
inline std::size_t support_cut(const TruncatedSeries& g) {
  double cdf = 0.0;
  for (std::size_t k = 0; k <= g.k_max(); ++k) {
    cdf += g[k];
    if (cdf >= kTvCdfCut) return k;
  }
  return g.k_max();
}

inline ResultTable cri_pmf(const ExperimentConfig& c, NRange nr, std::vector<Algorithm> algs) {
  const auto scene = make_scene(c);
  ResultTable t;
  t.columns = {"n", "k"};
  for (auto a : algs) {
    t.columns.push_back("analytic_" + column_tag(a));
    t.columns.push_back("empirical_" + column_tag(a));
  }
  std::uint64_t grid = 0;
  for (int n = nr.lo; n <= nr.hi; ++n) {
    std::vector<TruncatedSeries> analytic;
    std::vector<std::vector<double>> empirical;
    std::size_t cut = 1;
    for (auto a : algs) {
      const auto model = a == Algorithm::sta ? sta_model(c, n) : SplitModel::fair(n);
      analytic.push_back(build_pgf_adaptive(a, model));
      cut = std::max(cut, support_cut(analytic.back()));
      const auto batch = run_episode_batch(episode(c, scene, a, n, scene.cdr), c.replications,
                                           derive_seed(c.seed, grid++), c.threads);
      empirical.push_back(batch.summary.slot_pmf);
      t.diagnostics.push_back({"tv_" + column_tag(a) + "_n" + std::to_string(n), "tv",
                               total_variation(analytic.back(), empirical.back()), c.tv_threshold});
    }
    for (std::size_t k = 1; k <= cut; ++k) {
      std::vector<double> row{static_cast<double>(n), static_cast<double>(k)};
      for (std::size_t i = 0; i < algs.size(); ++i) {
        row.push_back(analytic[i][k]);
        row.push_back(k < empirical[i].size() ? empirical[i][k] : 0.0);
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

inline ResultTable dist_pdf(const ExperimentConfig& c, NRange nr, bool lens) {
  const auto scene = make_scene(c);
  const DecisionRegion region = lens ? DecisionRegion{scene.cdr} : DecisionRegion{scene.sdr};
  ResultTable t;
  t.columns = {"n", "rank", "d", "analytic_pdf", "analytic_ccdf", "empirical_ccdf"};
  for (int n = std::max(nr.lo, 1); n <= nr.hi; ++n) {
    const auto ranks = sample_rank_distances(region, scene.destination, n, c.replications,
                                             derive_seed(c.seed, static_cast<std::uint64_t>(n)));
    for (int rank = 1; rank <= n; ++rank) {
      auto sorted = ranks[static_cast<std::size_t>(rank - 1)];
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < c.grid_points; ++i) {
        const double d = c.range * i / (c.grid_points - 1);
        const double above = static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), d));
        t.rows.push_back({static_cast<double>(n), static_cast<double>(rank), d, nth_neighbor_pdf(region, rank, n, d),
                          nth_neighbor_ccdf(region, rank, n, d), above / static_cast<double>(sorted.size())});
      }
      t.diagnostics.push_back({"ks_n" + std::to_string(n) + "_rank" + std::to_string(rank), "ks",
                               rank_ks(region, rank, n, sorted), c.ks_threshold});
    }
  }
  return t;
}

inline constexpr int kIterationRounds = 3;

// Region at round t: the whole lens, then the top-priority band of the previous
// round's partition.
inline std::vector<DecisionRegion> iteration_regions(const ExperimentConfig& c, const Scene& s) {
  std::vector<DecisionRegion> out{s.cdr};
  for (int t = 2; t <= kIterationRounds; ++t) out.push_back(partition_region(out.back(), c.q)[0]);
  return out;
}

inline ResultTable iter_gain(const ExperimentConfig& c, NRange nr, bool nearest) {
  const auto scene = make_scene(c);
  const auto regions = iteration_regions(c, scene);
  ResultTable t;
  t.columns = {"n", "round", "analytic", "empirical", "std_error"};
  int violations = 0;
  std::uint64_t grid = 0;
  for (int n = std::max(nr.lo, 1); n <= nr.hi; ++n) {
    const int rank = nearest ? 1 : n;
    double prev = -1.0;
    for (int round = 1; round <= kIterationRounds; ++round) {
      const auto& region = regions[static_cast<std::size_t>(round - 1)];
      const double analytic = expected_nth_distance(region, rank, n);
      const auto ranks = sample_rank_distances(region, scene.destination, n, c.replications, derive_seed(c.seed, grid++));
      const auto& sample = ranks[static_cast<std::size_t>(rank - 1)];
      const auto st = sample_stats(sample);
      t.rows.push_back({static_cast<double>(n), static_cast<double>(round), analytic, st.mean, st.std_error});
      t.diagnostics.push_back({"ks_n" + std::to_string(n) + "_round" + std::to_string(round), "ks",
                               rank_ks(region, rank, n, sample), c.ks_threshold});
      if (nearest && !(analytic > prev)) ++violations;
      prev = analytic;
    }
  }
  if (nearest) t.diagnostics.push_back({"nearest_increases_over_rounds", "violations", double(violations), 0.0});
  return t;
}

inline ResultTable exp_dist(const ExperimentConfig& c, NRange nr, bool nearest) {
  const auto scene = make_scene(c);
  const std::array<std::pair<std::string, DecisionRegion>, 2> regions{
      std::pair<std::string, DecisionRegion>{"sdr", scene.sdr}, std::pair<std::string, DecisionRegion>{"cdr", scene.cdr}};
  ResultTable t;
  t.columns = {"n"};
  for (const auto& [name, r] : regions) {
    t.columns.push_back(name + "_analytic");
    t.columns.push_back(name + "_empirical");
    t.columns.push_back(name + "_std_error");
  }
  std::array<int, 2> violations{0, 0};
  std::array<double, 2> prev{nearest ? 2.0 * c.range : -1.0, nearest ? 2.0 * c.range : -1.0};
  std::uint64_t grid = 0;
  for (int n = std::max(nr.lo, 1); n <= nr.hi; ++n) {
    const int rank = nearest ? 1 : n;
    std::vector<double> row{static_cast<double>(n)};
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const auto& [name, region] = regions[i];
      const double analytic = expected_nth_distance(region, rank, n);
      const auto ranks = sample_rank_distances(region, scene.destination, n, c.replications, derive_seed(c.seed, grid++));
      const auto& sample = ranks[static_cast<std::size_t>(rank - 1)];
      const auto st = sample_stats(sample);
      row.insert(row.end(), {analytic, st.mean, st.std_error});
      t.diagnostics.push_back({"ks_" + name + "_n" + std::to_string(n), "ks", rank_ks(region, rank, n, sample),
                               c.ks_threshold});
      if (nearest ? !(analytic < prev[i]) : !(analytic > prev[i])) ++violations[i];
      prev[i] = analytic;
    }
    t.rows.push_back(std::move(row));
  }
  const std::string trend = nearest ? "_decreases_in_n" : "_increases_in_n";
  for (std::size_t i = 0; i < regions.size(); ++i)
    t.diagnostics.push_back({regions[i].first + trend, "violations", double(violations[i]), 0.0});
  return t;
}

inline ResultTable progress_vs_cri(const ExperimentConfig& c, NRange nr, std::vector<Algorithm> algs) {
  const auto scene = make_scene(c);
  const bool auction = algs.front() != Algorithm::sta;
  ResultTable t;
  t.columns = {"n"};
  for (auto a : algs) {
    t.columns.push_back("analytic_mean_cri_" + column_tag(a));
    t.columns.push_back("empirical_mean_cri_" + column_tag(a));
  }
  t.columns.insert(t.columns.end(), {"analytic_distance", "empirical_distance", "distance_std_error"});
  std::uint64_t grid = 0;
  for (int n = std::max(nr.lo, 1); n <= nr.hi; ++n) {
    std::vector<double> row{static_cast<double>(n)};
    std::vector<double> winners;
    for (auto a : algs) {
      const auto model = a == Algorithm::sta ? sta_model(c, n) : SplitModel::fair(n);
      const auto g = build_pgf_adaptive(a, model);
      const auto batch = run_episode_batch(episode(c, scene, a, n, scene.cdr), c.replications,
                                           derive_seed(c.seed, grid++), c.threads);
      row.push_back(moments(g).mean);
      row.push_back(batch.summary.mean_slots);
      t.diagnostics.push_back({"tv_" + column_tag(a) + "_n" + std::to_string(n), "tv",
                               total_variation(g, batch.summary.slot_pmf), c.tv_threshold});
      // Both auction variants elect the same relay; keep the first batch's winners.
      if (winners.empty())
        for (const auto& r : batch.records) winners.push_back(r.winner_distance);
    }
    const double analytic = auction ? expected_auction_winner_distance(scene.cdr, n) : expected_nth_distance(scene.cdr, n, n);
    const auto st = sample_stats(winners);
    row.insert(row.end(), {analytic, st.mean, st.std_error});
    t.diagnostics.push_back({"z_distance_n" + std::to_string(n), "z",
                             st.std_error > 0.0 ? std::abs(st.mean - analytic) / st.std_error : 0.0, c.z_threshold});
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Every protocol's CRI law and both regions' distance laws for each N.
inline ResultTable validation(const ExperimentConfig& c, NRange nr) {
  check_auction(c);
  const auto scene = make_scene(c);
  const std::array<Algorithm, 3> algs{Algorithm::sta, Algorithm::auction, Algorithm::auction_skip};
  ResultTable t;
  t.columns = {"n", "tv_sta", "tv_auction", "tv_auction_skip", "ks_sdr_max", "ks_cdr_max"};
  std::uint64_t grid = 0;
  for (int n = std::max(nr.lo, 1); n <= nr.hi; ++n) {
    std::vector<double> row{static_cast<double>(n)};
    for (auto a : algs) {
      const auto g = build_pgf_adaptive(a, a == Algorithm::sta ? sta_model(c, n) : SplitModel::fair(n));
      const auto batch = run_episode_batch(episode(c, scene, a, n, scene.cdr), c.replications,
                                           derive_seed(c.seed, grid++), c.threads);
      const double tv = total_variation(g, batch.summary.slot_pmf);
      row.push_back(tv);
      t.diagnostics.push_back({"tv_" + column_tag(a) + "_n" + std::to_string(n), "tv", tv, c.tv_threshold});
    }
    for (const auto& [name, region] : {std::pair<std::string, DecisionRegion>{"sdr", scene.sdr},
                                       std::pair<std::string, DecisionRegion>{"cdr", scene.cdr}}) {
      const auto ranks = sample_rank_distances(region, scene.destination, n, c.replications, derive_seed(c.seed, grid++));
      double worst = 0.0;
      for (int rank = 1; rank <= n; ++rank)
        worst = std::max(worst, rank_ks(region, rank, n, ranks[static_cast<std::size_t>(rank - 1)]));
      row.push_back(worst);
      t.diagnostics.push_back({"ks_" + name + "_n" + std::to_string(n), "ks", worst, c.ks_threshold});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace detail

inline bool is_experiment_id(std::string_view id) {
  return std::find(kExperimentIds.begin(), kExperimentIds.end(), id) != kExperimentIds.end();
}

inline std::string experiment_id_list() {
  std::string s;
  for (auto id : kExperimentIds) s += (s.empty() ? "" : ", ") + std::string(id);
  return s;
}

inline ResultTable run_experiment(const ExperimentConfig& config) {
  const std::string_view id = config.id;
  if (!is_experiment_id(id) && id != "validate")
    throw DomainError("unknown experiment '" + config.id + "'; expected one of: " + experiment_id_list());
  const auto def = detail::default_n_range(id);
  const detail::NRange nr{config.n_min.value_or(def.lo), config.n_max.value_or(config.n_min ? *config.n_min : def.hi)};
  detail::check_config(config, nr);

  ResultTable t;
  if (id == "cri_pmf_sta") {
    t = detail::cri_pmf(config, nr, {Algorithm::sta});
  } else if (id == "cri_pmf_auction") {
    detail::check_auction(config);
    t = detail::cri_pmf(config, nr, {Algorithm::auction, Algorithm::auction_skip});
  } else if (id == "dist_pdf_sdr" || id == "dist_pdf_cdr") {
    t = detail::dist_pdf(config, nr, id == "dist_pdf_cdr");
  } else if (id == "iter_gain_nearest" || id == "iter_gain_furthest") {
    t = detail::iter_gain(config, nr, id == "iter_gain_nearest");
  } else if (id == "exp_dist_nearest" || id == "exp_dist_furthest") {
    t = detail::exp_dist(config, nr, id == "exp_dist_nearest");
  } else if (id == "progress_vs_cri_sta") {
    t = detail::progress_vs_cri(config, nr, {Algorithm::sta});
  } else if (id == "progress_vs_cri_auction") {
    detail::check_auction(config);
    t = detail::progress_vs_cri(config, nr, {Algorithm::auction, Algorithm::auction_skip});
  } else {
    t = detail::validation(config, nr);
  }
  const auto canon = detail::canonical(config, nr);
  t.provenance = {{"experiment", config.id},
                  {"config", canon},
                  {"config_hash", hex64(fnv1a(canon))},
                  {"seed", std::to_string(config.seed)},
                  {"version", std::string(kVersion)}};
  if (t.rows.empty()) throw DomainError("experiment produced no rows; check the N range");
  return t;
}

}  // namespace cgf
