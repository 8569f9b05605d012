#pragma once

// Slot-synchronous simulation of relay election on a collision channel with
// ternary slot outcome (idle / single / collision) and blocked access: only
// relays eligible when the CRI opens ever transmit during it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgf/errors.hpp"
#include "cgf/geometry.hpp"
#include "cgf/pgf.hpp"
#include "cgf/sampling.hpp"

namespace cgf {

enum class SlotFeedback : char { idle = 'I', single = 'S', collision = 'C' };

inline SlotFeedback feedback_for(std::size_t transmitters) {
  if (transmitters == 0) return SlotFeedback::idle;
  return transmitters == 1 ? SlotFeedback::single : SlotFeedback::collision;
}

inline std::string trace_symbols(std::span<const SlotFeedback> trace) {
  std::string s;
  s.reserve(trace.size());
  for (auto f : trace) s.push_back(static_cast<char>(f));
  return s;
}

inline std::vector<SlotFeedback> parse_trace(std::string_view symbols) {
  std::vector<SlotFeedback> out;
  out.reserve(symbols.size());
  for (char c : symbols) {
    switch (c) {
      case 'I': out.push_back(SlotFeedback::idle); break;
      case 'S': out.push_back(SlotFeedback::single); break;
      case 'C': out.push_back(SlotFeedback::collision); break;
      default: throw DomainError(std::string("invalid trace symbol '") + c + "'");
    }
  }
  return out;
}

enum class ProgressMetric { separation, projection };

struct SimOptions {
  bool count_rts = false;  // add the source's request slot to the CRI length
  ProgressMetric metric = ProgressMetric::separation;
  std::size_t max_slots = 100000;
  // Called once per slot with the relay indices that transmitted.
  std::function<void(std::span<const std::size_t>, SlotFeedback)> on_slot;
};

struct CriRecord {
  Algorithm protocol = Algorithm::sta;
  int n = 0;
  int slots = 0;
  std::optional<int> winner;  // relay id
  double winner_distance = std::numeric_limits<double>::quiet_NaN();
  double winner_progress = std::numeric_limits<double>::quiet_NaN();
  bool backoff = false;
  std::vector<SlotFeedback> trace;

  friend bool operator==(const CriRecord& a, const CriRecord& b) {
    auto same = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
    return a.protocol == b.protocol && a.n == b.n && a.slots == b.slots && a.winner == b.winner &&
           same(a.winner_distance, b.winner_distance) && same(a.winner_progress, b.winner_progress) &&
           a.backoff == b.backoff && a.trace == b.trace;
  }
};

inline double progress_of(const Topology& topo, const Relay& relay, ProgressMetric metric) {
  const Point2 v = relay.position - topo.source;
  if (metric == ProgressMetric::separation) return norm(v);
  return dot(v, unit(topo.destination - topo.source));
}

namespace detail {

class SlotLog {
 public:
  SlotLog(CriRecord& rec, const SimOptions& opt) : rec_(rec), opt_(opt) {}

  SlotFeedback transmit(std::span<const std::size_t> who) {
    const auto fb = feedback_for(who.size());
    rec_.trace.push_back(fb);
    if (opt_.on_slot) opt_.on_slot(who, fb);
    if (rec_.trace.size() > opt_.max_slots) throw ResourceError("CRI exceeded the slot limit");
    return fb;
  }

  void finish() { rec_.slots = static_cast<int>(rec_.trace.size()) + (opt_.count_rts ? 1 : 0); }

 private:
  CriRecord& rec_;
  const SimOptions& opt_;
};

inline void set_winner(CriRecord& rec, const Topology& topo, std::size_t idx, ProgressMetric metric) {
  const Relay& r = topo.relays[idx];
  rec.winner = r.id;
  rec.winner_distance = distance(r.position, topo.source);
  rec.winner_progress = progress_of(topo, r, metric);
}

}  // namespace detail

// Splitting-tree election: colliding sets split by an i.i.d. Q-sided coin,
// group 0 transmits first, the rest wait on a stack. The CRI ends when every
// eligible relay has been heard alone; the source then picks the relay with
// the largest progress (lowest id on ties).
inline CriRecord run_sta(const Topology& topo, const SplitModel& model, std::uint64_t seed,
                         const SimOptions& options = {}) {
  model.validate();
  const auto eligible = topo.eligible();
  if (eligible.size() != static_cast<std::size_t>(model.n))
    throw DomainError("run_sta: eligible relay count differs from model.n");

  CriRecord rec;
  rec.protocol = Algorithm::sta;
  rec.n = model.n;
  detail::SlotLog log(rec, options);
  Rng rng(seed);

  std::vector<std::vector<std::size_t>> stack{eligible};
  std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(model.q));
  while (!stack.empty()) {
    auto group = std::move(stack.back());
    stack.pop_back();
    if (log.transmit(group) != SlotFeedback::collision) continue;
    for (auto& g : groups) g.clear();
    for (auto idx : group) groups[rng.categorical(model.p)].push_back(idx);
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) stack.push_back(*it);
  }
  log.finish();

  if (eligible.empty()) {
    rec.backoff = true;
    return rec;
  }
  std::size_t best = eligible.front();
  double best_progress = progress_of(topo, topo.relays[best], options.metric);
  for (auto idx : eligible) {
    const double pr = progress_of(topo, topo.relays[idx], options.metric);
    if (pr > best_progress || (pr == best_progress && topo.relays[idx].id < topo.relays[best].id)) {
      best = idx;
      best_progress = pr;
    }
  }
  detail::set_winner(rec, topo, best, options.metric);
  return rec;
}

// How the auction CRI opens.
enum class AuctionStart {
  conflict,  // all eligible relays answer the request in the first slot
  descent,   // bands answer in priority order from the first slot
};

struct AuctionOptions {
  int q = 2;
  bool skip = false;  // idle first band lets the remaining band re-split without colliding
  AuctionStart start = AuctionStart::conflict;
  SimOptions sim;
};

// Dutch-auction election over priority bands of the decision region. A single
// reply ends the auction. A collision prunes every other band and the colliding
// band is re-partitioned into Q equal-mass bands. Band membership follows from
// the topology, so the episode has no randomness of its own.
inline CriRecord run_auction(const Topology& topo, const AuctionOptions& options = {}) {
  if (options.q < 2) throw DomainError("run_auction: Q must be >= 2");
  const auto eligible = topo.eligible();
  CriRecord rec;
  rec.protocol = options.skip ? Algorithm::auction_skip : Algorithm::auction;
  rec.n = static_cast<int>(eligible.size());
  detail::SlotLog log(rec, options.sim);

  std::vector<std::size_t> contenders = eligible;
  DecisionRegion current = topo.region;
  bool known_collided = false;

  if (options.start == AuctionStart::conflict) {
    const auto fb = log.transmit(contenders);
    if (fb == SlotFeedback::idle) {
      rec.backoff = true;
      log.finish();
      return rec;
    }
    if (fb == SlotFeedback::single) {
      detail::set_winner(rec, topo, contenders.front(), options.sim.metric);
      log.finish();
      return rec;
    }
    known_collided = true;
  }

  std::vector<std::size_t> members;
  for (;;) {
    const auto bands = partition_region(current, options.q);
    bool descended = false;
    for (std::size_t j = 0; j < bands.size(); ++j) {
      members.clear();
      for (auto idx : contenders)
        if (contains(bands[j], topo.relays[idx].position)) members.push_back(idx);
      const bool last = j + 1 == bands.size();
      if (options.skip && known_collided && last && j > 0) {
        // Every higher band was idle, so all contenders sit here.
        current = bands[j];
        descended = true;
        break;
      }
      const auto fb = log.transmit(members);
      if (fb == SlotFeedback::idle) continue;
      if (fb == SlotFeedback::single) {
        detail::set_winner(rec, topo, members.front(), options.sim.metric);
        log.finish();
        return rec;
      }
      contenders = members;
      current = bands[j];
      known_collided = true;
      descended = true;
      break;
    }
    if (!descended) {
      rec.backoff = true;
      log.finish();
      return rec;
    }
  }
}

}  // namespace cgf
