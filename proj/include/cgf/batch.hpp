#pragma once

// Independent replications of one election scenario. Episode i draws its
// topology and coin flips from derive_seed(master, i), so results do not depend
// on the thread count or scheduling.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include "cgf/protocol.hpp"
#include "cgf/sampling.hpp"
#include "cgf/stats.hpp"

namespace cgf {

struct EpisodeConfig {
  Algorithm protocol = Algorithm::sta;
  int n = 5;                        // relays dropped in the decision region
  int q = 2;
  std::vector<double> p{0.5, 0.5};  // splitting coin (STA only)
  DecisionRegion region = make_sector({0.0, 0.0}, {3.0, 0.0}, 1.0, std::numbers::pi);
  Point2 destination{3.0, 0.0};
  double awake_probability = 1.0;
  AuctionStart start = AuctionStart::conflict;
  SimOptions sim;
};

struct Episode {
  CriRecord record;
  std::vector<double> eligible_distances;  // sorted ascending
};

inline Episode run_episode(const EpisodeConfig& cfg, std::uint64_t episode_seed) {
  SamplingOptions so;
  so.awake_probability = cfg.awake_probability;
  const Topology topo = sample_topology(cfg.region, cfg.destination, cfg.n, derive_seed(episode_seed, 0), so);
  Episode ep;
  for (auto idx : topo.eligible()) ep.eligible_distances.push_back(distance(topo.relays[idx].position, topo.source));
  std::sort(ep.eligible_distances.begin(), ep.eligible_distances.end());

  if (cfg.protocol == Algorithm::sta) {
    SplitModel model{static_cast<int>(ep.eligible_distances.size()), cfg.q, cfg.p};
    ep.record = run_sta(topo, model, derive_seed(episode_seed, 1), cfg.sim);
  } else {
    AuctionOptions ao;
    ao.q = cfg.q;
    ao.skip = cfg.protocol == Algorithm::auction_skip;
    ao.start = cfg.start;
    ao.sim = cfg.sim;
    ep.record = run_auction(topo, ao);
  }
  return ep;
}

struct BatchSummary {
  std::size_t replications = 0;
  std::vector<double> slot_pmf;
  double mean_slots = 0.0;
  double var_slots = 0.0;
  double mean_winner_distance = 0.0;
  std::vector<double> mean_rank_distance;  // [r] = mean distance of the (r+1)-th nearest eligible relay
  std::size_t backoffs = 0;

  bool operator==(const BatchSummary&) const = default;
};

struct BatchResult {
  std::vector<CriRecord> records;
  std::vector<std::vector<double>> rank_distances;  // [r] = samples of the (r+1)-th nearest distance
  BatchSummary summary;
};

inline BatchResult run_episode_batch(const EpisodeConfig& cfg, std::size_t replications, std::uint64_t master_seed,
                                     unsigned threads = 1) {
  if (replications < 1) throw DomainError("run_episode_batch: replications must be >= 1");
  std::vector<Episode> episodes(replications);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replications)));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) episodes[i] = run_episode(cfg, derive_seed(master_seed, i));
  };
  if (threads == 1) {
    work(0, replications);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (replications + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(replications, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  BatchResult out;
  out.records.reserve(replications);
  std::vector<int> slots;
  slots.reserve(replications);
  std::vector<double> winner_distances;
  for (auto& ep : episodes) {
    slots.push_back(ep.record.slots);
    if (ep.record.winner) winner_distances.push_back(ep.record.winner_distance);
    if (ep.record.backoff) ++out.summary.backoffs;
    if (out.rank_distances.size() < ep.eligible_distances.size()) out.rank_distances.resize(ep.eligible_distances.size());
    for (std::size_t r = 0; r < ep.eligible_distances.size(); ++r) out.rank_distances[r].push_back(ep.eligible_distances[r]);
    out.records.push_back(std::move(ep.record));
  }
  auto& s = out.summary;
  s.replications = replications;
  s.slot_pmf = empirical_pmf(slots);
  std::vector<double> slot_values(slots.begin(), slots.end());
  const auto st = sample_stats(slot_values);
  s.mean_slots = st.mean;
  s.var_slots = st.variance;
  s.mean_winner_distance = sample_stats(winner_distances).mean;
  for (const auto& rd : out.rank_distances) s.mean_rank_distance.push_back(sample_stats(rd).mean);
  return out;
}

}  // namespace cgf
