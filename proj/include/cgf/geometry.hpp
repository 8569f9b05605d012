#pragma once

// Forwarding decision regions around a source node with transmission range R.
//
//  * SectorRegion: circular sector of the range disk, oriented toward the
//    destination. Priority bands are source-centred sub-annuli.
//  * LensRegion: range disk intersected with a disk of radius rho centred at
//    the anchor, the point at distance R from the source on the
//    source->destination axis. Priority bands are anchor-centred slices,
//    highest priority closest to the anchor.
//
// All areas reduce to two-circle intersections, so they are closed form.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "cgf/errors.hpp"

namespace cgf {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

inline Point2 unit(Point2 a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw DomainError("cannot normalise a zero vector");
  return {a.x / n, a.y / n};
}

struct SectorRegion {
  Point2 center;           // source
  double range = 1.0;      // transmission range R
  Point2 axis{1.0, 0.0};   // unit vector toward the destination
  double aperture = std::numbers::pi;
  // Radial extent of a priority band; a full sector spans [0, range].
  double r_inner = 0.0;
  double r_outer = 1.0;
};

struct LensRegion {
  Point2 source;
  double range = 1.0;  // transmission range R
  Point2 anchor;       // source + R * axis
  double rho = 1.0;    // outer anchor radius
  double rho_inner = 0.0;  // > 0 only for priority bands below the top one
};

using DecisionRegion = std::variant<SectorRegion, LensRegion>;

inline SectorRegion make_sector(Point2 source, Point2 destination, double range, double aperture) {
  if (!(range > 0.0)) throw DomainError("sector: range must be > 0");
  if (!(aperture > 0.0 && aperture <= 2.0 * std::numbers::pi + 1e-12))
    throw DomainError("sector: aperture must lie in (0, 2pi]");
  return SectorRegion{source, range, unit(destination - source), std::min(aperture, 2.0 * std::numbers::pi),
                      0.0, range};
}

// rho defaults to the transmission range.
inline LensRegion make_lens(Point2 source, Point2 destination, double range, std::optional<double> rho = {}) {
  if (!(range > 0.0)) throw DomainError("lens: range must be > 0");
  const double r = rho.value_or(range);
  if (!(r > 0.0 && r <= 2.0 * range)) throw DomainError("lens: rho must lie in (0, 2R]");
  return LensRegion{source, range, source + range * unit(destination - source), r, 0.0};
}

inline Point2 source_of(const DecisionRegion& region) {
  return std::visit([](const auto& r) {
    if constexpr (std::is_same_v<std::decay_t<decltype(r)>, SectorRegion>) return r.center;
    else return r.source;
  }, region);
}

inline double range_of(const DecisionRegion& region) {
  return std::visit([](const auto& r) { return r.range; }, region);
}

// Area of the intersection of two disks with radii r1, r2 whose centres are D apart.
inline double circle_intersection_area(double r1, double r2, double D) {
  if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
  if (D >= r1 + r2) return 0.0;
  if (D <= std::abs(r1 - r2)) {
    const double r = std::min(r1, r2);
    return std::numbers::pi * r * r;
  }
  const double c1 = std::clamp((D * D + r1 * r1 - r2 * r2) / (2.0 * D * r1), -1.0, 1.0);
  const double c2 = std::clamp((D * D + r2 * r2 - r1 * r1) / (2.0 * D * r2), -1.0, 1.0);
  const double k = (-D + r1 + r2) * (D + r1 - r2) * (D - r1 + r2) * (D + r1 + r2);
  return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(std::max(k, 0.0));
}

namespace detail {

inline double anchor_offset(const LensRegion& lens) { return distance(lens.anchor, lens.source); }

// |disk(source, range) ∩ disk(anchor, r)|
inline double lens_core_area(const LensRegion& lens, double r) {
  return circle_intersection_area(lens.range, r, anchor_offset(lens));
}

inline void validate(const SectorRegion& s) {
  if (!(s.range > 0.0)) throw DomainError("sector: range must be > 0");
  if (!(s.aperture > 0.0 && s.aperture <= 2.0 * std::numbers::pi + 1e-12))
    throw DomainError("sector: aperture must lie in (0, 2pi]");
  if (!(s.r_inner >= 0.0 && s.r_inner < s.r_outer && s.r_outer <= s.range * (1.0 + 1e-12)))
    throw DomainError("sector: band radii must satisfy 0 <= r_inner < r_outer <= range");
}

inline void validate(const LensRegion& l) {
  if (!(l.range > 0.0)) throw DomainError("lens: range must be > 0");
  if (!(l.rho > 0.0 && l.rho <= 2.0 * l.range * (1.0 + 1e-12)))
    throw DomainError("lens: rho must lie in (0, 2R]");
  if (!(l.rho_inner >= 0.0 && l.rho_inner < l.rho)) throw DomainError("lens: rho_inner must lie in [0, rho)");
}

}  // namespace detail

inline double region_area(const SectorRegion& s) {
  return 0.5 * s.aperture * (s.r_outer * s.r_outer - s.r_inner * s.r_inner);
}

inline double region_area(const LensRegion& l) {
  return detail::lens_core_area(l, l.rho) - detail::lens_core_area(l, l.rho_inner);
}

inline double region_area(const DecisionRegion& region) {
  return std::visit([](const auto& r) { return region_area(r); }, region);
}

inline bool contains(const SectorRegion& s, Point2 p) {
  const Point2 v = p - s.center;
  const double r = norm(v);
  if (r > s.r_outer || r > s.range) return false;
  if (s.r_inner > 0.0 && r <= s.r_inner) return false;
  if (r == 0.0) return true;
  if (s.aperture >= 2.0 * std::numbers::pi) return true;
  return std::abs(std::atan2(cross(s.axis, v), dot(s.axis, v))) <= 0.5 * s.aperture;
}

inline bool contains(const LensRegion& l, Point2 p) {
  if (distance(p, l.source) > l.range) return false;
  const double a = distance(p, l.anchor);
  if (a > l.rho) return false;
  return !(l.rho_inner > 0.0 && a <= l.rho_inner);
}

inline bool contains(const DecisionRegion& region, Point2 p) {
  return std::visit([p](const auto& r) { return contains(r, p); }, region);
}

namespace detail {

inline double checked_radius(double range, double d) {
  constexpr double slack = 1e-12;
  if (!(d >= -slack * range && d <= range * (1.0 + slack)))
    throw DomainError("radial distance must lie in [0, R]");
  return std::clamp(d, 0.0, range);
}

}  // namespace detail

// Probability that a uniform point of the region lies within distance d of the source.
inline double radial_mass(const SectorRegion& s, double d) {
  d = detail::checked_radius(s.range, d);
  const double c = std::clamp(d, s.r_inner, s.r_outer);
  return (c * c - s.r_inner * s.r_inner) / (s.r_outer * s.r_outer - s.r_inner * s.r_inner);
}

inline double radial_mass(const LensRegion& l, double d) {
  d = detail::checked_radius(l.range, d);
  const double D = detail::anchor_offset(l);
  const double inside = circle_intersection_area(d, l.rho, D) - circle_intersection_area(d, l.rho_inner, D);
  return std::clamp(inside / region_area(l), 0.0, 1.0);
}

inline double radial_mass(const DecisionRegion& region, double d) {
  return std::visit([d](const auto& r) { return radial_mass(r, d); }, region);
}

// Distances at which radial_mass has a kink; quadrature splits there.
inline std::vector<double> radial_breakpoints(const DecisionRegion& region) {
  std::vector<double> pts;
  const double R = range_of(region);
  auto add = [&](double v) {
    if (v > 0.0 && v < R) pts.push_back(v);
  };
  if (const auto* s = std::get_if<SectorRegion>(&region)) {
    add(s->r_inner);
    add(s->r_outer);
  } else {
    const auto& l = std::get<LensRegion>(region);
    const double D = detail::anchor_offset(l);
    for (double r : {l.rho, l.rho_inner}) {
      if (r <= 0.0) continue;
      add(std::abs(D - r));
      add(D + r);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Integrates f over [a, b], split at the given interior breakpoints.
template <class F>
double integrate_piecewise(F&& f, double a, double b, std::span<const double> breaks, double tol = 1e-12) {
  std::vector<double> knots{a};
  for (double x : breaks)
    if (x > a && x < b) knots.push_back(x);
  knots.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] <= knots[i]) continue;
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, knots[i], knots[i + 1], 15, tol,
                                                                           &err);
  }
  return total;
}

namespace detail {

// Angular measure of the circle |x - source| = s lying inside disk(anchor, r), D = |anchor - source|.
inline double arc_inside(double s, double r, double D) {
  if (r <= 0.0) return 0.0;
  if (s <= 0.0) return D <= r ? 2.0 * std::numbers::pi : 0.0;
  if (s + D <= r) return 2.0 * std::numbers::pi;
  if (s >= D + r || D >= s + r) return 0.0;
  return 2.0 * std::acos(std::clamp((s * s + D * D - r * r) / (2.0 * s * D), -1.0, 1.0));
}

}  // namespace detail

// radial_mass by adaptive quadrature over the source-centred radius. Independent
// of the two-circle closed form.
inline double radial_mass_quadrature(const DecisionRegion& region, double d) {
  const double R = range_of(region);
  d = detail::checked_radius(R, d);
  if (d == 0.0) return 0.0;
  const auto breaks = radial_breakpoints(region);
  return std::visit([&](const auto& r) {
    using T = std::decay_t<decltype(r)>;
    std::function<double(double)> density;
    if constexpr (std::is_same_v<T, SectorRegion>) {
      density = [&r](double s) { return (s >= r.r_inner && s <= r.r_outer) ? s * r.aperture : 0.0; };
    } else {
      const double D = detail::anchor_offset(r);
      density = [&r, D](double s) {
        return s * (detail::arc_inside(s, r.rho, D) - detail::arc_inside(s, r.rho_inner, D));
      };
    }
    return integrate_piecewise(density, 0.0, d, breaks, 1e-13) / region_area(r);
  }, region);
}

// Axis-aligned box {min, max} enclosing the region.
inline std::array<Point2, 2> bounding_box(const DecisionRegion& region) {
  if (const auto* s = std::get_if<SectorRegion>(&region)) {
    const double base = std::atan2(s->axis.y, s->axis.x);
    const double half = 0.5 * s->aperture;
    std::vector<Point2> pts;
    auto at = [&](double radius, double ang) {
      return Point2{s->center.x + radius * std::cos(ang), s->center.y + radius * std::sin(ang)};
    };
    if (s->r_inner == 0.0) pts.push_back(s->center);
    for (double radius : {s->r_inner, s->r_outer}) {
      pts.push_back(at(radius, base - half));
      pts.push_back(at(radius, base + half));
    }
    for (int c = -8; c <= 8; ++c) {
      const double ang = c * std::numbers::pi / 2.0;
      double rel = std::remainder(ang - base, 2.0 * std::numbers::pi);
      if (std::abs(rel) <= half || s->aperture >= 2.0 * std::numbers::pi) pts.push_back(at(s->r_outer, ang));
    }
    Point2 lo = pts.front();
    Point2 hi = pts.front();
    for (const auto& p : pts) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    return {lo, hi};
  }
  const auto& l = std::get<LensRegion>(region);
  const Point2 lo{std::max(l.source.x - l.range, l.anchor.x - l.rho), std::max(l.source.y - l.range, l.anchor.y - l.rho)};
  const Point2 hi{std::min(l.source.x + l.range, l.anchor.x + l.rho), std::min(l.source.y + l.range, l.anchor.y + l.rho)};
  return {lo, hi};
}

inline constexpr double kPartitionMassTolerance = 1e-10;

// Splits the region into bands carrying the given probability masses (which
// must sum to 1), returned in priority order.
inline std::vector<DecisionRegion> partition_region(const DecisionRegion& region, std::span<const double> masses) {
  if (masses.size() < 2) throw DomainError("partition_region: need at least two groups");
  double total = 0.0;
  for (double m : masses) {
    if (!(m > 0.0)) throw DomainError("partition_region: band masses must be positive");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("partition_region: band masses must sum to 1");
  const double area = region_area(region);
  if (!(area > 0.0)) throw DomainError("partition_region: empty region");

  std::vector<DecisionRegion> bands;
  if (const auto* s = std::get_if<SectorRegion>(&region)) {
    detail::validate(*s);
    // Outermost sub-annulus first: it is the one closest to the destination.
    const double in2 = s->r_inner * s->r_inner;
    const double span = s->r_outer * s->r_outer - in2;
    double outer = s->r_outer;
    double cum = 0.0;
    for (std::size_t j = 0; j < masses.size(); ++j) {
      cum += masses[j];
      const double inner = (j + 1 == masses.size()) ? s->r_inner : std::sqrt(std::max(0.0, in2 + (1.0 - cum) * span));
      SectorRegion band = *s;
      band.r_inner = inner;
      band.r_outer = outer;
      bands.emplace_back(band);
      outer = inner;
    }
    return bands;
  }

  const auto& l = std::get<LensRegion>(region);
  detail::validate(l);
  const double base = detail::lens_core_area(l, l.rho_inner);
  double inner = l.rho_inner;
  double cum = 0.0;
  for (std::size_t j = 0; j < masses.size(); ++j) {
    cum += masses[j];
    double outer = l.rho;
    if (j + 1 < masses.size()) {
      const double target = base + cum * area;
      auto f = [&](double r) { return detail::lens_core_area(l, r) - target; };
      // Terminate on mass, not radius: the area is flat where the anchor disk
      // already covers the range disk.
      auto done = [&](double a, double b) {
        return std::abs(detail::lens_core_area(l, 0.5 * (a + b)) - target) <= 1e-3 * kPartitionMassTolerance * area ||
               (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * l.rho;
      };
      std::uintmax_t iters = 400;
      const auto [a, b] = boost::math::tools::bisect(f, inner, l.rho, done, iters);
      outer = 0.5 * (a + b);
    }
    LensRegion band = l;
    band.rho_inner = inner;
    band.rho = outer;
    bands.emplace_back(band);
    inner = outer;
  }
  return bands;
}

inline std::vector<DecisionRegion> partition_region(const DecisionRegion& region, int q) {
  if (q < 2) throw DomainError("partition_region: Q must be >= 2");
  const std::vector<double> masses(static_cast<std::size_t>(q), 1.0 / q);
  return partition_region(region, masses);
}

// Sector with the lens's source and range whose area equals the lens area.
inline SectorRegion calibrate_sdr(const LensRegion& lens) {
  detail::validate(lens);
  const double aperture = 2.0 * region_area(lens) / (lens.range * lens.range);
  if (aperture > 2.0 * std::numbers::pi * (1.0 + 1e-12))
    throw InfeasibleError("calibrate_sdr: required aperture exceeds 2pi");
  if (!(aperture > 0.0)) throw InfeasibleError("calibrate_sdr: lens has zero area");
  return SectorRegion{lens.source, lens.range, unit(lens.anchor - lens.source),
                      std::min(aperture, 2.0 * std::numbers::pi), 0.0, lens.range};
}

}  // namespace cgf
