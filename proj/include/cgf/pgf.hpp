#pragma once

// Generating functions of the contention-resolution interval (CRI) length L_N
// for splitting-tree and auction-based relay selection.
//
// Every recursion below is implicit in G_N: the terms in which all N nodes
// land in one group reproduce G_N on the right-hand side. They are moved to
// the left, which leaves G_N = b(z) / (1 - d(z)) with a low-degree polynomial
// d. Division by (1 - d) is then the causal recurrence a_k = b_k + sum d_j a_{k-j},
// so coefficient k only depends on lower-index coefficients and truncation at
// k_max is exact for every retained coefficient.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "cgf/binomial.hpp"
#include "cgf/errors.hpp"
#include "cgf/series.hpp"

namespace cgf {

struct SplitModel {
  int n = 0;                  // initial conflict multiplicity
  int q = 2;                  // number of splitting groups
  std::vector<double> p{0.5, 0.5};  // per-group probability

  static SplitModel fair(int n, int q = 2) {
    return SplitModel{n, q, std::vector<double>(static_cast<std::size_t>(q), 1.0 / q)};
  }

  // Binary model where a node joins the first group with probability p0.
  static SplitModel binary(int n, double p0) { return SplitModel{n, 2, {p0, 1.0 - p0}}; }

  void validate() const {
    if (n < 0) throw DomainError("split model: n must be >= 0");
    if (q < 2) throw DomainError("split model: q must be >= 2");
    if (p.size() != static_cast<std::size_t>(q))
      throw DomainError("split model: probability vector length must equal q");
    double total = 0.0;
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("split model: probabilities must lie in [0,1]");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("split model: probabilities must sum to 1");
  }
};

enum class Algorithm { sta, auction, auction_skip };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sta: return "sta";
    case Algorithm::auction: return "auction";
    case Algorithm::auction_skip: return "auction-skip";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "sta") return Algorithm::sta;
  if (s == "auction") return Algorithm::auction;
  if (s == "auction-skip" || s == "auction_skip") return Algorithm::auction_skip;
  throw DomainError("unknown protocol '" + std::string(s) + "' (expected sta, auction, auction-skip)");
}

// B_{N,i}: probability that exactly i of the N colliding nodes pick the first group.
inline double split_prob(const SplitModel& model, int i) {
  model.validate();
  if (model.q != 2) throw DomainError("split_prob: binary model required (q = 2)");
  if (i < 0 || i > model.n) throw DomainError("split_prob: i must lie in [0, n]");
  return binomial_pmf(model.n, i, model.p[0]);
}

namespace detail {

using Coeffs = std::vector<double>;

inline Coeffs identity_z(std::size_t k_max) {
  Coeffs c(k_max + 1, 0.0);
  if (k_max >= 1) c[1] = 1.0;
  return c;
}

// out[k] = b[k] + sum_j d[j] * out[k - j]   (d[0] unused)
inline Coeffs divide_one_minus(const Coeffs& b, const std::vector<double>& d) {
  Coeffs a(b.size(), 0.0);
  for (std::size_t k = 0; k < b.size(); ++k) {
    double v = b[k];
    for (std::size_t j = 1; j < d.size() && j <= k; ++j) v += d[j] * a[k - j];
    a[k] = v;
  }
  return a;
}

inline void check_k_max(std::size_t k_max) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
}

// Visits every composition (i_1..i_q) of m with non-negative parts.
inline void for_each_composition(int m, int q, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> parts(static_cast<std::size_t>(q), 0);
  std::function<void(int, int)> rec = [&](int slot, int remaining) {
    if (slot == q - 1) {
      parts[static_cast<std::size_t>(slot)] = remaining;
      fn(parts);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      parts[static_cast<std::size_t>(slot)] = v;
      rec(slot + 1, remaining - v);
    }
  };
  rec(0, m);
}

inline double multinomial_prob(const std::vector<int>& parts, const std::vector<double>& p) {
  int m = 0;
  double lw = 0.0;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const int i = parts[j];
    m += i;
    if (i == 0) continue;
    if (p[j] <= 0.0) return 0.0;
    lw += i * std::log(p[j]) - std::lgamma(i + 1.0);
  }
  return std::exp(lw + std::lgamma(m + 1.0));
}

inline double composition_count(int m, int q) {
  // C(m + q - 1, q - 1)
  return std::exp(std::lgamma(m + q) - std::lgamma(q) - std::lgamma(m + 1.0));
}

}  // namespace detail

// Splitting-tree CRI with a binary coin:
//   G_N = z sum_i B_{N,i} G_i G_{N-i},  G_0 = G_1 = z.
inline TruncatedSeries sta_pgf_binary(const SplitModel& model, std::size_t k_max) {
  model.validate();
  if (model.q != 2) throw DomainError("sta_pgf_binary: q must be 2");
  detail::check_k_max(k_max);
  const double p0 = model.p[0];
  std::vector<detail::Coeffs> g;
  g.reserve(static_cast<std::size_t>(model.n) + 1);
  g.push_back(detail::identity_z(k_max));
  g.push_back(detail::identity_z(k_max));
  for (int m = 2; m <= model.n; ++m) {
    detail::Coeffs prod(k_max + 1, 0.0);
    // G_i G_{m-i} == G_{m-i} G_i: each unordered pair is convolved once.
    for (int i = 1; 2 * i <= m; ++i) {
      double w = binomial_pmf(m, i, p0);
      if (i != m - i) w += binomial_pmf(m, m - i, p0);
      detail::convolve_add(prod, g[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(m - i)], w);
    }
    detail::Coeffs b(k_max + 1, 0.0);
    for (std::size_t k = 1; k <= k_max; ++k) b[k] = prod[k - 1];
    const double c = binomial_pmf(m, 0, p0) + binomial_pmf(m, m, p0);
    g.push_back(detail::divide_one_minus(b, {0.0, 0.0, c}));
  }
  return TruncatedSeries(std::move(g[static_cast<std::size_t>(std::max(model.n, 1))]));
}

inline constexpr double kDefaultMaxCompositions = 2.0e6;

// Splitting-tree CRI with a Q-sided coin:
//   G_N = z sum_{i_1+..+i_Q=N} multinomial(N; i) prod_j p_j^{i_j} G_{i_j}.
inline TruncatedSeries sta_pgf_qary(const SplitModel& model, std::size_t k_max,
                                    double max_compositions = kDefaultMaxCompositions) {
  model.validate();
  detail::check_k_max(k_max);
  const int q = model.q;
  for (int m = 2; m <= model.n; ++m)
    if (detail::composition_count(m, q) > max_compositions)
      throw ResourceError("sta_pgf_qary: " + std::to_string(detail::composition_count(m, q)) +
                          " compositions exceed the limit for n=" + std::to_string(model.n) +
                          ", q=" + std::to_string(q));

  std::vector<detail::Coeffs> g;
  g.push_back(detail::identity_z(k_max));
  g.push_back(detail::identity_z(k_max));
  detail::Coeffs prod(k_max + 1);
  detail::Coeffs scratch(k_max + 1);
  for (int m = 2; m <= model.n; ++m) {
    detail::Coeffs sum(k_max + 1, 0.0);
    detail::for_each_composition(m, q, [&](const std::vector<int>& parts) {
      for (int v : parts)
        if (v == m) return;  // degenerate: moved to the left side
      const double w = detail::multinomial_prob(parts, model.p);
      if (w == 0.0) return;
      prod = g[static_cast<std::size_t>(parts[0])];
      for (std::size_t j = 1; j < parts.size(); ++j) {
        std::fill(scratch.begin(), scratch.end(), 0.0);
        detail::convolve_add(scratch, prod, g[static_cast<std::size_t>(parts[j])], 1.0);
        prod.swap(scratch);
      }
      for (std::size_t k = 0; k <= k_max; ++k) sum[k] += w * prod[k];
    });
    detail::Coeffs b(k_max + 1, 0.0);
    for (std::size_t k = 1; k <= k_max; ++k) b[k] = sum[k - 1];
    // All m nodes in group j: the other q-1 groups are idle slots, z^(q-1) G_m.
    double c = 0.0;
    for (double pj : model.p) c += std::pow(pj, m);
    std::vector<double> d(static_cast<std::size_t>(q) + 1, 0.0);
    d[static_cast<std::size_t>(q)] = c;
    g.push_back(detail::divide_one_minus(b, d));
  }
  return TruncatedSeries(std::move(g[static_cast<std::size_t>(std::max(model.n, 1))]));
}

namespace detail {

// Shared body of the two auction recursions; `idle_cost` is the number of
// slots charged to the B_{N,0} branch (2 without skip, 1 with skip).
inline TruncatedSeries auction_series(const SplitModel& model, std::size_t k_max, std::size_t idle_cost) {
  model.validate();
  if (model.q != 2) throw DomainError("auction pgf: q must be 2");
  check_k_max(k_max);
  const double p0 = model.p[0];
  std::vector<Coeffs> g;
  g.push_back(identity_z(k_max));
  g.push_back(identity_z(k_max));
  for (int m = 2; m <= model.n; ++m) {
    Coeffs b(k_max + 1, 0.0);
    if (k_max >= 2) b[2] = binomial_pmf(m, 1, p0);
    // Tree pruning: a colliding first group is resolved alone, the rest drops out.
    for (int i = 2; i < m; ++i) {
      const double w = binomial_pmf(m, i, p0);
      const auto& gi = g[static_cast<std::size_t>(i)];
      for (std::size_t k = 1; k <= k_max; ++k) b[k] += w * gi[k - 1];
    }
    std::vector<double> d(3, 0.0);
    d[idle_cost] += binomial_pmf(m, 0, p0);
    d[1] += binomial_pmf(m, m, p0);
    g.push_back(divide_one_minus(b, d));
  }
  return TruncatedSeries(std::move(g[static_cast<std::size_t>(std::max(model.n, 1))]));
}

}  // namespace detail

// Auction with tree pruning:
//   G_N = z^2 B_{N,0} G_N + z^2 B_{N,1} + z sum_{i>=2} B_{N,i} G_i.
inline TruncatedSeries auction_pgf(const SplitModel& model, std::size_t k_max) {
  return detail::auction_series(model, k_max, 2);
}

// Auction whose idle first group skips a tree level:
//   G_N = z B_{N,0} G_N + z^2 B_{N,1} + z sum_{i>=2} B_{N,i} G_i.
inline TruncatedSeries auction_skip_pgf(const SplitModel& model, std::size_t k_max) {
  return detail::auction_series(model, k_max, 1);
}

inline TruncatedSeries build_pgf(Algorithm algorithm, const SplitModel& model, std::size_t k_max) {
  switch (algorithm) {
    case Algorithm::sta:
      return model.q == 2 ? sta_pgf_binary(model, k_max) : sta_pgf_qary(model, k_max);
    case Algorithm::auction: return auction_pgf(model, k_max);
    case Algorithm::auction_skip: return auction_skip_pgf(model, k_max);
  }
  throw DomainError("build_pgf: unknown algorithm");
}

struct TruncationPolicy {
  double tail_target = 1e-9;
  std::size_t k_start = 128;
  std::size_t k_cap = 16384;
};

// Doubles k_max until the tail mass falls below the target.
inline TruncatedSeries build_pgf_adaptive(Algorithm algorithm, const SplitModel& model,
                                          TruncationPolicy policy = {}) {
  for (std::size_t k = policy.k_start;; k *= 2) {
    k = std::min(k, policy.k_cap);
    auto series = build_pgf(algorithm, model, k);
    if (series.tail_mass() < policy.tail_target) return series;
    if (k >= policy.k_cap)
      throw InsufficientTruncation("tail mass " + std::to_string(series.tail_mass()) +
                                   " still above target at k_max cap " + std::to_string(policy.k_cap));
  }
}

// Direct evaluation of G_N at a complex point through the same rational
// forms, without going through coefficients. Used as a second route to the
// series (Fourier inversion of this function must reproduce the coefficients).
inline std::complex<double> pgf_value(Algorithm algorithm, const SplitModel& model, std::complex<double> z) {
  model.validate();
  using C = std::complex<double>;
  std::vector<C> g{z, z};
  const double p0 = model.p[0];
  for (int m = 2; m <= model.n; ++m) {
    C num{0.0, 0.0};
    C den{1.0, 0.0};
    if (algorithm == Algorithm::sta) {
      if (model.q == 2) {
        for (int i = 1; i < m; ++i)
          num += binomial_pmf(m, i, p0) * g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(m - i)];
        num *= z;
        den -= z * z * (binomial_pmf(m, 0, p0) + binomial_pmf(m, m, p0));
      } else {
        detail::for_each_composition(m, model.q, [&](const std::vector<int>& parts) {
          for (int v : parts)
            if (v == m) return;
          C prod{detail::multinomial_prob(parts, model.p), 0.0};
          for (int v : parts) prod *= g[static_cast<std::size_t>(v)];
          num += prod;
        });
        num *= z;
        double c = 0.0;
        for (double pj : model.p) c += std::pow(pj, m);
        den -= std::pow(z, model.q) * c;
      }
    } else {
      if (model.q != 2) throw DomainError("pgf_value: auction requires q = 2");
      num = z * z * binomial_pmf(m, 1, p0);
      for (int i = 2; i < m; ++i) num += z * binomial_pmf(m, i, p0) * g[static_cast<std::size_t>(i)];
      const double b0 = binomial_pmf(m, 0, p0);
      const double bm = binomial_pmf(m, m, p0);
      den -= (algorithm == Algorithm::auction ? z * z * b0 : z * b0) + z * bm;
    }
    g.push_back(num / den);
  }
  return g[static_cast<std::size_t>(std::max(model.n, 1))];
}

}  // namespace cgf
