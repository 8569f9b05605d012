#pragma once

// Distance from the source to the n-th nearest of N points of a binomial point
// process on a decision region. With p_d the radial mass of the region,
//   Pr{D_n > d} = Pr{fewer than n points within d} = sum_{k<n} C(N,k) p_d^k (1-p_d)^(N-k).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "cgf/binomial.hpp"
#include "cgf/errors.hpp"
#include "cgf/geometry.hpp"

namespace cgf {

namespace detail {

inline void check_rank(int n, int N) {
  if (N < 1) throw DomainError("number of points N must be >= 1");
  if (n < 1 || n > N) throw DomainError("rank n must lie in [1, N]");
}

}  // namespace detail

inline double nth_neighbor_ccdf(const DecisionRegion& region, int n, int N, double d) {
  detail::check_rank(n, N);
  return binomial_cdf(N, n - 1, radial_mass(region, d));
}

// d/dd radial_mass. The boundary of disk(source, d) contributes its arc length
// inside the region, which is exact for both region kinds.
inline double radial_density(const DecisionRegion& region, double d) {
  const double R = range_of(region);
  d = detail::checked_radius(R, d);
  if (const auto* s = std::get_if<SectorRegion>(&region)) {
    if (d < s->r_inner || d > s->r_outer) return 0.0;
    return 2.0 * d / (s->r_outer * s->r_outer - s->r_inner * s->r_inner);
  }
  const auto& l = std::get<LensRegion>(region);
  const double D = distance(l.anchor, l.source);
  return d * (detail::arc_inside(d, l.rho, D) - detail::arc_inside(d, l.rho_inner, D)) / region_area(l);
}

// Central difference of radial_mass with step 1e-5 R, one-sided at the ends.
inline double radial_density_numeric(const DecisionRegion& region, double d) {
  const double R = range_of(region);
  const double h = 1e-5 * R;
  const double lo = std::max(0.0, d - h);
  const double hi = std::min(R, d + h);
  return (radial_mass(region, hi) - radial_mass(region, lo)) / (hi - lo);
}

// f_{D_n}(d) = N C(N-1, n-1) p_d^(n-1) (1-p_d)^(N-n) p_d'.
inline double nth_neighbor_pdf(const DecisionRegion& region, int n, int N, double d) {
  detail::check_rank(n, N);
  const double p = radial_mass(region, d);
  return N * binomial_pmf(N - 1, n - 1, p) * radial_density(region, d);
}

inline constexpr double kExpectationTolerance = 1e-8;

// E[D_n] = integral over [0, R] of the CCDF.
inline double expected_nth_distance(const DecisionRegion& region, int n, int N) {
  detail::check_rank(n, N);
  const auto breaks = radial_breakpoints(region);
  return integrate_piecewise([&](double d) { return nth_neighbor_ccdf(region, n, N, d); }, 0.0,
                             range_of(region), breaks, kExpectationTolerance * 1e-2);
}

// Mean source distance of the auction winner among N uniform relays. Nested
// anchor-centred bands make the winner the relay closest to the anchor; for a
// sector (outermost band first) it is the furthest relay from the source.
inline double expected_auction_winner_distance(const DecisionRegion& region, int N) {
  detail::check_rank(1, N);
  if (std::holds_alternative<SectorRegion>(region)) return expected_nth_distance(region, N, N);
  const auto& l = std::get<LensRegion>(region);
  const double D = distance(l.anchor, l.source);
  const double area = region_area(l);
  const double base = detail::lens_core_area(l, l.rho_inner);
  // r: anchor distance; the part of circle(anchor, r) inside the range disk is an
  // arc centred on the source direction, at source distance sqrt(D^2+r^2-2Dr cos t).
  auto shell = [&](double r) {
    const double half = 0.5 * detail::arc_inside(r, l.range, D);
    if (half <= 0.0) return 0.0;
    auto dist = [&](double t) { return std::sqrt(std::max(0.0, D * D + r * r - 2.0 * D * r * std::cos(t))); };
    const double mean_dist =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(dist, -half, half, 10, 1e-12);
    const double survive = 1.0 - std::clamp((detail::lens_core_area(l, r) - base) / area, 0.0, 1.0);
    return N * std::pow(survive, N - 1) * r * mean_dist / area;
  };
  std::vector<double> breaks;
  for (double b : {std::abs(l.range - D), l.range + D})
    if (b > l.rho_inner && b < l.rho) breaks.push_back(b);
  return integrate_piecewise(shell, l.rho_inner, l.rho, breaks, 1e-11);
}

// Smallest d with Pr{D_n <= d} >= prob, by bisection.
inline double nth_distance_quantile(const DecisionRegion& region, int n, int N, double prob) {
  detail::check_rank(n, N);
  if (!(prob > 0.0 && prob < 1.0)) throw DomainError("quantile probability must lie in (0,1)");
  auto f = [&](double d) { return (1.0 - nth_neighbor_ccdf(region, n, N, d)) - prob; };
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13; };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::bisect(f, 0.0, range_of(region), tol, iters);
  return 0.5 * (a + b);
}

}  // namespace cgf
