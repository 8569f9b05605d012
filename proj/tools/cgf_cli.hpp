#pragma once

// Command-line front end. cli_main is kept apart from main() so tests can drive
// it with in-memory streams.

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgf/experiments.hpp"
#include "cgf/inversion.hpp"
#include "cgf/records.hpp"

namespace cgf::cli {

enum ExitCode : int { ok = 0, usage = 2, validation_failed = 3, resource_limit = 4 };

struct NRange {
  int lo = 5;
  int hi = 5;
};

// "4" or "2..5"
inline NRange parse_n_range(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw DomainError("invalid N '" + text + "' (expected N or LO..HI)");
    return v;
  };
  const auto dots = text.find("..");
  NRange r;
  if (dots == std::string::npos) {
    r.lo = r.hi = to_int(text);
  } else {
    r.lo = to_int(text.substr(0, dots));
    r.hi = to_int(text.substr(dots + 2));
  }
  if (r.lo < 0 || r.hi < r.lo) throw DomainError("invalid N range '" + text + "'");
  return r;
}

// One machine-parseable line: error kind=<kind> code=<code> message="<text>"
inline void report(std::ostream& err, std::string_view kind, int code, std::string message) {
  std::replace(message.begin(), message.end(), '\n', ' ');
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped.push_back('\\');
    escaped.push_back(c);
  }
  err << "error kind=" << kind << " code=" << code << " message=\"" << escaped << "\"\n";
}

namespace detail {

struct Common {
  std::string output;
  std::uint64_t seed = 1;
};

struct Params {
  std::string protocol = "sta";
  std::string n = "5";
  int q = 2;
  double p = 0.5;
  std::string region = "cdr";
  double range = 1.0;
  std::optional<double> rho;
  std::optional<double> aperture;
  std::size_t reps = 100000;
  unsigned threads = 1;
};

inline void add_seed(CLI::App* sc, Common& c) {
  sc->add_option("--seed", c.seed, "master seed (default from CGF_SEED, else 1)")->envname("CGF_SEED");
}

inline void add_output(CLI::App* sc, Common& c) { sc->add_option("-o,--output", c.output, "output path (default stdout)"); }

inline void add_model(CLI::App* sc, Params& p) {
  sc->add_option("--n", p.n, "number of contenders: N or LO..HI");
  sc->add_option("--q", p.q, "number of splitting groups / bands")->check(CLI::PositiveNumber);
  sc->add_option("--p", p.p, "probability of the first splitting group");
}

inline void add_geometry(CLI::App* sc, Params& p) {
  sc->add_option("--region", p.region, "decision region")->check(CLI::IsMember({"sdr", "cdr"}));
  sc->add_option("-R,--range", p.range, "transmission range (m)");
  sc->add_option("--rho", p.rho, "lens radius about the anchor (default R)");
  sc->add_option("--aperture", p.aperture, "sector aperture in radians (default: calibrated from the lens)");
}

inline SplitModel model_for(Algorithm a, int n, const Params& p) {
  if (a != Algorithm::sta) {
    if (p.q != 2) throw DomainError("auction PGFs are binary; use --q 2");
    return SplitModel::binary(n, p.p);
  }
  if (p.q == 2) return SplitModel::binary(n, p.p);
  if (p.p != 0.5) throw DomainError("--p applies to binary splitting only");
  return SplitModel::fair(n, p.q);
}

inline DecisionRegion region_for(const Params& p) {
  const Point2 src{0.0, 0.0};
  const Point2 dst{3.0 * p.range, 0.0};
  if (p.region == "cdr") {
    if (p.aperture) throw DomainError("--aperture applies to --region sdr only");
    return make_lens(src, dst, p.range, p.rho.value_or(p.range));
  }
  if (p.aperture) return make_sector(src, dst, p.range, *p.aperture);
  return calibrate_sdr(make_lens(src, dst, p.range, p.rho.value_or(p.range)));
}

inline void add_provenance(ResultTable& t, std::string_view command, const std::string& canon, std::uint64_t seed) {
  t.provenance = {{"command", std::string(command)},
                  {"config", canon},
                  {"config_hash", hex64(fnv1a(canon))},
                  {"seed", std::to_string(seed)},
                  {"version", std::string(kVersion)}};
}

inline std::string canon_params(const Params& p) {
  return "protocol=" + p.protocol + ";n=" + p.n + ";q=" + std::to_string(p.q) + ";p=" + format_number(p.p) +
         ";region=" + p.region + ";R=" + format_number(p.range) +
         ";rho=" + (p.rho ? format_number(*p.rho) : std::string("R")) +
         ";aperture=" + (p.aperture ? format_number(*p.aperture) : std::string("calibrated")) +
         ";reps=" + std::to_string(p.reps);
}

// Writes to the output path if one was given, else to `out`.
inline void emit(const Common& c, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (c.output.empty()) {
    body(out);
    return;
  }
  std::ofstream f(c.output, std::ios::binary | std::ios::trunc);
  if (!f) throw DomainError("cannot open output file '" + c.output + "'");
  body(f);
  if (!f) throw ResourceError("failed writing output file '" + c.output + "'");
}

}  // namespace detail

inline int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contention-based geographic forwarding toolkit", "cgf"};
  app.set_config("--config", "", "read options from a TOML/INI config file");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  detail::Common common;
  detail::Params params;
  std::function<int()> action;

  // pmf
  auto* pmf = app.add_subcommand("pmf", "analytic CRI length PMF");
  std::optional<std::size_t> pmf_kmax;
  pmf->add_option("--protocol", params.protocol, "sta, auction or auction-skip");
  detail::add_model(pmf, params);
  pmf->add_option("--kmax", pmf_kmax, "largest slot count to print (default: until the CDF reaches 1-1e-9)");
  detail::add_output(pmf, common);
  pmf->callback([&] {
    action = [&] {
      const auto alg = parse_algorithm(params.protocol);
      const auto nr = parse_n_range(params.n);
      ResultTable t;
      const bool many = nr.hi > nr.lo;
      t.columns = many ? std::vector<std::string>{"n", "k", "probability"} : std::vector<std::string>{"k", "probability"};
      for (int n = nr.lo; n <= nr.hi; ++n) {
        const auto model = detail::model_for(alg, n, params);
        const auto g = pmf_kmax ? build_pgf(alg, model, *pmf_kmax) : build_pgf_adaptive(alg, model);
        for (std::size_t k = 1; k <= g.k_max(); ++k) {
          if (g[k] == 0.0) continue;
          if (!pmf_kmax && g.cdf(k - 1) >= 1.0 - 1e-9) break;
          if (many) t.rows.push_back({double(n), double(k), g[k]});
          else t.rows.push_back({double(k), g[k]});
        }
      }
      detail::add_provenance(t, "pmf", detail::canon_params(params), common.seed);
      t.provenance.erase(t.provenance.begin() + 3);  // no randomness: drop the seed line
      detail::emit(common, out, [&](std::ostream& os) { write_csv(os, t); });
      return int(ok);
    };
  });

  // invert
  auto* inv = app.add_subcommand("invert", "Fourier inversion of a CRI generating function at k");
  int inv_k = 1;
  InversionParams inv_params;
  inv->add_option("--protocol", params.protocol, "sta, auction or auction-skip");
  detail::add_model(inv, params);
  inv->add_option("--k", inv_k, "slot count")->required();
  inv->add_option("--r", inv_params.r, "contour radius (default 10^(-gamma/2k))");
  inv->add_option("--gamma", inv_params.gamma, "accuracy parameter for the default radius");
  detail::add_output(inv, common);
  inv->callback([&] {
    action = [&] {
      const auto alg = parse_algorithm(params.protocol);
      const auto nr = parse_n_range(params.n);
      ResultTable t;
      t.columns = {"n", "k", "probability", "raw", "radius"};
      for (int n = nr.lo; n <= nr.hi; ++n) {
        const auto model = detail::model_for(alg, n, params);
        const auto res = invert_fourier([&](std::complex<double> z) { return pgf_value(alg, model, z); }, inv_k, inv_params);
        t.rows.push_back({double(n), double(inv_k), res.probability, res.raw, res.radius});
      }
      const std::string canon = detail::canon_params(params) + ";k=" + std::to_string(inv_k) +
                                ";r=" + (inv_params.r ? format_number(*inv_params.r) : std::string("auto")) +
                                ";gamma=" + format_number(inv_params.gamma);
      detail::add_provenance(t, "invert", canon, common.seed);
      t.provenance.erase(t.provenance.begin() + 3);
      detail::emit(common, out, [&](std::ostream& os) { write_csv(os, t); });
      return int(ok);
    };
  });

  // distance
  auto* dist = app.add_subcommand("distance", "n-th nearest neighbour distance law");
  int rank = 1;
  int of = 5;
  std::string stat = "ccdf";
  std::vector<double> at;
  int grid = 101;
  double prob = 0.5;
  detail::add_geometry(dist, params);
  dist->add_option("--rank", rank, "neighbour rank n");
  dist->add_option("--of", of, "number of points N");
  dist->add_option("--stat", stat, "ccdf, pdf, mean or median")->check(CLI::IsMember({"ccdf", "pdf", "mean", "median", "quantile"}));
  dist->add_option("--d", at, "distances to evaluate (default: uniform grid on [0,R])");
  dist->add_option("--grid", grid, "grid points when --d is not given")->check(CLI::Range(2, 1000000));
  dist->add_option("--prob", prob, "probability for --stat quantile");
  detail::add_output(dist, common);
  dist->callback([&] {
    action = [&] {
      const auto region = detail::region_for(params);
      ResultTable t;
      if (stat == "mean" || stat == "median" || stat == "quantile") {
        t.columns = {"rank", "of", stat};
        const double v = stat == "mean" ? expected_nth_distance(region, rank, of)
                                        : nth_distance_quantile(region, rank, of, stat == "median" ? 0.5 : prob);
        t.rows.push_back({double(rank), double(of), v});
      } else {
        t.columns = {"d", stat};
        std::vector<double> ds = at;
        if (ds.empty())
          for (int i = 0; i < grid; ++i) ds.push_back(params.range * i / (grid - 1));
        for (double d : ds)
          t.rows.push_back({d, stat == "ccdf" ? nth_neighbor_ccdf(region, rank, of, d) : nth_neighbor_pdf(region, rank, of, d)});
      }
      const std::string canon = detail::canon_params(params) + ";rank=" + std::to_string(rank) +
                                ";of=" + std::to_string(of) + ";stat=" + stat;
      detail::add_provenance(t, "distance", canon, common.seed);
      t.provenance.erase(t.provenance.begin() + 3);
      detail::emit(common, out, [&](std::ostream& os) { write_csv(os, t); });
      return int(ok);
    };
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo relay-election episodes");
  std::string format = "csv";
  double awake = 1.0;
  std::string start = "conflict";
  std::string metric = "separation";
  bool count_rts = false;
  sim->add_option("--protocol", params.protocol, "sta, auction or auction-skip");
  detail::add_model(sim, params);
  detail::add_geometry(sim, params);
  sim->add_option("--reps", params.reps, "replications")->check(CLI::PositiveNumber);
  sim->add_option("--threads", params.threads, "worker threads (output does not depend on it)");
  sim->add_option("--format", format, "csv or records (JSON Lines)")->check(CLI::IsMember({"csv", "records"}));
  sim->add_option("--awake", awake, "probability that a relay is awake");
  sim->add_option("--start", start, "auction opening: conflict or descent")->check(CLI::IsMember({"conflict", "descent"}));
  sim->add_option("--metric", metric, "progress metric")->check(CLI::IsMember({"separation", "projection"}));
  sim->add_flag("--count-rts", count_rts, "count the source's request slot in the CRI");
  detail::add_seed(sim, common);
  detail::add_output(sim, common);
  sim->callback([&] {
    action = [&] {
      const auto nr = parse_n_range(params.n);
      if (nr.lo != nr.hi) throw DomainError("simulate takes a single N");
      EpisodeConfig cfg;
      cfg.protocol = parse_algorithm(params.protocol);
      cfg.n = nr.lo;
      cfg.q = params.q;
      cfg.p = detail::model_for(Algorithm::sta, nr.lo, params).p;
      cfg.region = detail::region_for(params);
      cfg.destination = {3.0 * params.range, 0.0};
      cfg.awake_probability = awake;
      cfg.start = start == "descent" ? AuctionStart::descent : AuctionStart::conflict;
      cfg.sim.count_rts = count_rts;
      cfg.sim.metric = metric == "projection" ? ProgressMetric::projection : ProgressMetric::separation;
      const auto batch = run_episode_batch(cfg, params.reps, common.seed, params.threads);
      detail::emit(common, out, [&](std::ostream& os) {
        if (format == "records") {
          for (const auto& r : batch.records) write_record(os, r);
          return;
        }
        ResultTable t;
        t.columns = {"episode", "n", "slots", "winner", "winner_distance", "winner_progress", "backoff"};
        for (std::size_t i = 0; i < batch.records.size(); ++i) {
          const auto& r = batch.records[i];
          t.rows.push_back({double(i), double(r.n), double(r.slots), r.winner ? double(*r.winner) : std::nan(""),
                            r.winner_distance, r.winner_progress, r.backoff ? 1.0 : 0.0});
        }
        const std::string canon = detail::canon_params(params) + ";awake=" + format_number(awake) + ";start=" + start +
                                  ";metric=" + metric + ";count_rts=" + (count_rts ? "1" : "0");
        detail::add_provenance(t, "simulate", canon, common.seed);
        const auto& s = batch.summary;
        t.provenance.push_back({"mean_slots", format_number(s.mean_slots)});
        t.provenance.push_back({"var_slots", format_number(s.var_slots)});
        t.provenance.push_back({"mean_winner_distance", format_number(s.mean_winner_distance)});
        t.provenance.push_back({"backoffs", std::to_string(s.backoffs)});
        write_csv(os, t);
      });
      return int(ok);
    };
  });

  // experiment and validate share the experiment configuration
  ExperimentConfig exp;
  std::string exp_n;
  auto add_experiment_options = [&](CLI::App* sc) {
    sc->add_option("--n", exp_n, "N or LO..HI (default per experiment)");
    sc->add_option("--q", exp.q, "number of splitting groups / bands");
    sc->add_option("--p", exp.p, "probability of the first splitting group");
    sc->add_option("-R,--range", exp.range, "transmission range (m)");
    sc->add_option("--rho", exp.rho, "lens radius about the anchor (default R)");
    sc->add_option("--aperture", exp.aperture, "SDR aperture in radians (default: calibrated from the lens)");
    sc->add_option("--reps", exp.replications, "replications")->check(CLI::PositiveNumber);
    sc->add_option("--tv-threshold", exp.tv_threshold, "total-variation threshold");
    sc->add_option("--ks-threshold", exp.ks_threshold, "Kolmogorov-Smirnov threshold");
    sc->add_option("--z-threshold", exp.z_threshold, "mean-error threshold in standard errors");
    sc->add_option("--grid", exp.grid_points, "distance grid points");
    sc->add_option("--threads", exp.threads, "worker threads (output does not depend on it)");
    sc->add_option("--seed", exp.seed, "master seed (default from CGF_SEED, else 1)")->envname("CGF_SEED");
    detail::add_output(sc, common);
  };
  auto run_table = [&] {
    if (!exp_n.empty()) {
      const auto nr = parse_n_range(exp_n);
      exp.n_min = nr.lo;
      exp.n_max = nr.hi;
    }
    const auto t = run_experiment(exp);
    detail::emit(common, out, [&](std::ostream& os) { write_csv(os, t); });
    if (!t.passed()) {
      std::string failed;
      for (const auto& d : t.diagnostics)
        if (!d.pass()) failed += (failed.empty() ? "" : ",") + d.name;
      report(err, "validation", validation_failed, "diagnostics above threshold: " + failed);
      return int(validation_failed);
    }
    return int(ok);
  };

  auto* ex = app.add_subcommand("experiment", "reproduce a figure family: " + experiment_id_list());
  ex->add_option("id", exp.id, "experiment id")->required();
  add_experiment_options(ex);
  ex->callback([&] { action = run_table; });

  auto* val = app.add_subcommand("validate", "analytic-vs-simulation agreement suite");
  add_experiment_options(val);
  val->callback([&] {
    exp.id = "validate";
    action = run_table;
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.help(app.get_subcommands().front()->get_name()));
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return ok;
  } catch (const CLI::ParseError& e) {
    report(err, "usage", usage, e.what());
    return usage;
  }

  try {
    return action ? action() : int(usage);
  } catch (const ResourceError& e) {
    report(err, "resource", resource_limit, e.what());
    return resource_limit;
  } catch (const InsufficientTruncation& e) {
    report(err, "resource", resource_limit, e.what());
    return resource_limit;
  } catch (const std::bad_alloc&) {
    report(err, "resource", resource_limit, "out of memory");
    return resource_limit;
  } catch (const std::exception& e) {
    report(err, "usage", usage, e.what());
    return usage;
  }
}

}  // namespace cgf::cli
