#pragma once

// Test-only reference computations. None of these go through the generating
// function recursions; they enumerate protocol behaviour or integrate directly.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "cgf/geometry.hpp"
#include "cgf/sampling.hpp"

namespace oracle {

// n! / (k! (n-k)!) p^k (1-p)^(n-k) with plain factorials.
inline double factorial_binomial(int n, int k, double p) {
  auto fact = [](int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  };
  return fact(n) / (fact(k) * fact(n - k)) * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

// Exact Pr{CRI = k} for k <= max_slots of the splitting-tree protocol, found by
// walking every coin outcome of the stack machine (group 0 served first).
inline std::vector<double> sta_pmf_by_enumeration(int n, const std::vector<double>& p, int max_slots) {
  std::vector<double> pmf(static_cast<std::size_t>(max_slots) + 1, 0.0);
  const int q = static_cast<int>(p.size());
  std::function<void(std::vector<int>, int, double)> walk = [&](std::vector<int> stack, int slots, double prob) {
    while (!stack.empty() && slots <= max_slots) {
      const int m = stack.back();
      stack.pop_back();
      ++slots;
      if (m >= 2) {
        // Branch over every assignment of the m colliders to q groups.
        std::vector<int> parts(static_cast<std::size_t>(q), 0);
        std::function<void(int, int, double)> assign = [&](int g, int left, double pr) {
          if (g == q - 1) {
            parts[static_cast<std::size_t>(g)] = left;
            pr *= std::pow(p[static_cast<std::size_t>(g)], left);
            // multinomial coefficient
            double coef = std::tgamma(m + 1.0);
            for (int v : parts) coef /= std::tgamma(v + 1.0);
            auto next = stack;
            for (int j = q - 1; j >= 0; --j) next.push_back(parts[static_cast<std::size_t>(j)]);
            walk(next, slots, prob * pr * coef);
            return;
          }
          for (int v = 0; v <= left; ++v) {
            parts[static_cast<std::size_t>(g)] = v;
            assign(g + 1, left - v, pr * std::pow(p[static_cast<std::size_t>(g)], v));
          }
        };
        assign(0, m, 1.0);
        return;
      }
    }
    if (stack.empty() && slots <= max_slots) pmf[static_cast<std::size_t>(slots)] += prob;
  };
  walk({n}, 0, 1.0);
  return pmf;
}

// Exact Pr{CRI = k} for k <= max_slots of the binary auction with pruning,
// enumerating the first-band occupancy after each collision.
inline std::vector<double> auction_pmf_by_enumeration(int n, double p0, bool skip, int max_slots) {
  std::vector<double> pmf(static_cast<std::size_t>(max_slots) + 1, 0.0);
  // m contenders have just collided; `slots` already includes that collision.
  std::function<void(int, int, double)> after_collision = [&](int m, int slots, double prob) {
    if (slots > max_slots) return;
    for (int i = 0; i <= m; ++i) {
      const double pr = prob * factorial_binomial(m, i, p0);
      if (i == 1) {
        if (slots + 1 <= max_slots) pmf[static_cast<std::size_t>(slots + 1)] += pr;
      } else if (i >= 2) {
        after_collision(i, slots + 1, pr);  // first band collides, second band drops out
      } else {
        // idle first band: second band holds all m
        after_collision(m, slots + (skip ? 1 : 2), pr);
      }
    }
  };
  if (n <= 1) {
    pmf[1] = 1.0;
    return pmf;
  }
  after_collision(n, 1, 1.0);
  return pmf;
}

// Hit-or-miss estimate of |{x in box : pred(x)}| with its standard error.
struct AreaEstimate {
  double area;
  double sigma;
};

template <class Pred>
AreaEstimate hit_or_miss(Pred&& pred, cgf::Point2 lo, cgf::Point2 hi, std::size_t samples, std::uint64_t seed) {
  cgf::Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const cgf::Point2 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    if (pred(p)) ++hits;
  }
  const double box = (hi.x - lo.x) * (hi.y - lo.y);
  const double f = static_cast<double>(hits) / static_cast<double>(samples);
  return {box * f, box * std::sqrt(f * (1.0 - f) / static_cast<double>(samples))};
}

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
