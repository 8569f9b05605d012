#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cgf/series.hpp"

namespace cgf {

// Normalised histogram of non-negative integer outcomes.
inline std::vector<double> empirical_pmf(std::span<const int> values) {
  if (values.empty()) return {};
  const int hi = *std::max_element(values.begin(), values.end());
  std::vector<double> pmf(static_cast<std::size_t>(std::max(hi, 0)) + 1, 0.0);
  for (int v : values)
    if (v >= 0) pmf[static_cast<std::size_t>(v)] += 1.0;
  for (auto& x : pmf) x /= static_cast<double>(values.size());
  return pmf;
}

inline constexpr double kTvCdfCut = 0.999;

// Total variation between an analytic PMF and an empirical one. Support is cut
// at the first k where the analytic CDF reaches `cdf_cut`; the mass beyond it
// is compared as one lumped cell.
inline double total_variation(const TruncatedSeries& analytic, std::span<const double> empirical,
                              double cdf_cut = kTvCdfCut) {
  std::size_t cut = analytic.k_max();
  double cdf = 0.0;
  for (std::size_t k = 0; k <= analytic.k_max(); ++k) {
    cdf += analytic[k];
    if (cdf >= cdf_cut) {
      cut = k;
      break;
    }
  }
  double tv = 0.0;
  double a_head = 0.0;
  double e_head = 0.0;
  for (std::size_t k = 0; k <= cut; ++k) {
    const double e = k < empirical.size() ? empirical[k] : 0.0;
    tv += std::abs(analytic[k] - e);
    a_head += analytic[k];
    e_head += e;
  }
  tv += std::abs((1.0 - a_head) - (1.0 - e_head));
  return 0.5 * tv;
}

// Kolmogorov-Smirnov distance sup |F_n - F| of a sample against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
  if (sample.empty()) return 0.0;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// sup |F - G| over a uniform grid of `points` on [a, b].
template <class F, class G>
double sup_distance(F&& f, G&& g, double a, double b, int points = 2001) {
  double d = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = a + (b - a) * i / (points - 1);
    d = std::max(d, std::abs(f(x) - g(x)));
  }
  return d;
}

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
  std::size_t count = 0;
};

template <class Range>
SampleStats sample_stats(const Range& values) {
  SampleStats s;
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    ++s.count;
  }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = s.count > 1 ? ss / static_cast<double>(s.count - 1) : 0.0;
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.count));
  return s;
}

}  // namespace cgf
