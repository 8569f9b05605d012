#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "cgf/errors.hpp"
#include "cgf/geometry.hpp"

namespace cgf {

// SplitMix64 finaliser; maps (master, index) to a well-mixed episode seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

// mt19937_64 with a fixed double conversion, so streams are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

  // Index j with probability weights[j] (weights sum to 1).
  std::size_t categorical(const std::vector<double>& weights) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < weights.size(); ++j) {
      acc += weights[j];
      if (u < acc) return j;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

inline constexpr double kMinRejectionEfficiency = 1e-3;

// Uniform point of the region by rejection from its bounding box.
inline Point2 sample_uniform(const DecisionRegion& region, Rng& rng) {
  const auto [lo, hi] = bounding_box(region);
  for (;;) {
    const Point2 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    if (contains(region, p)) return p;
  }
}

inline double rejection_efficiency(const DecisionRegion& region) {
  const auto [lo, hi] = bounding_box(region);
  const double box = (hi.x - lo.x) * (hi.y - lo.y);
  return box > 0.0 ? region_area(region) / box : 0.0;
}

struct Relay {
  int id = 0;
  Point2 position;
  bool awake = true;
};

struct Topology {
  Point2 source;
  Point2 destination;
  std::vector<Relay> relays;
  DecisionRegion region;

  // Indices of awake relays inside the decision region.
  std::vector<std::size_t> eligible() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < relays.size(); ++i)
      if (relays[i].awake && contains(region, relays[i].position)) out.push_back(i);
    return out;
  }
};

struct SamplingOptions {
  double awake_probability = 1.0;
  double min_efficiency = kMinRejectionEfficiency;
};

// N points of a binomial point process on the region; ids are 0..N-1.
inline Topology sample_topology(const DecisionRegion& region, Point2 destination, int n, std::uint64_t seed,
                                const SamplingOptions& options = {}) {
  if (n < 0) throw DomainError("sample_topology: N must be >= 0");
  if (!(options.awake_probability >= 0.0 && options.awake_probability <= 1.0))
    throw DomainError("sample_topology: awake probability must lie in [0,1]");
  if (n > 0 && rejection_efficiency(region) < options.min_efficiency)
    throw InfeasibleError("sample_topology: rejection efficiency below " + std::to_string(options.min_efficiency));
  Rng rng(seed);
  Topology topo{source_of(region), destination, {}, region};
  topo.relays.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Point2 p = sample_uniform(region, rng);
    const bool awake = options.awake_probability >= 1.0 || rng.bernoulli(options.awake_probability);
    topo.relays.push_back(Relay{i, p, awake});
  }
  return topo;
}

}  // namespace cgf
