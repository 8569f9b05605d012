#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "cgf/errors.hpp"

namespace cgf {

// Power series with non-negative coefficients truncated at z^k_max; holds the
// PMF of a non-negative integer random variable (coeffs[k] = Pr{L = k}).
class TruncatedSeries {
 public:
  TruncatedSeries() : coeffs_(1, 0.0) {}

  explicit TruncatedSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
  }

  // z^power truncated at k_max.
  static TruncatedSeries monomial(std::size_t power, std::size_t k_max) {
    std::vector<double> c(k_max + 1, 0.0);
    if (power <= k_max) c[power] = 1.0;
    return TruncatedSeries(std::move(c));
  }

  std::span<const double> coeffs() const { return coeffs_; }
  std::size_t k_max() const { return coeffs_.size() - 1; }

  double operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }

  double sum() const { return std::accumulate(coeffs_.begin(), coeffs_.end(), 0.0); }

  // Mass not represented by the retained coefficients.
  double tail_mass() const { return 1.0 - sum(); }

  // Smallest k with a non-zero coefficient, or k_max + 1 if all vanish.
  std::size_t min_support() const {
    auto it = std::find_if(coeffs_.begin(), coeffs_.end(), [](double c) { return c != 0.0; });
    return static_cast<std::size_t>(it - coeffs_.begin());
  }

  // Cumulative sum up to and including k.
  double cdf(std::size_t k) const {
    const auto last = std::min(k, k_max());
    return std::accumulate(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(last) + 1, 0.0);
  }

  bool operator==(const TruncatedSeries&) const = default;

 private:
  std::vector<double> coeffs_;
};

// Horner evaluation of sum coeffs[k] z^k.
inline std::complex<double> evaluate(const TruncatedSeries& series, std::complex<double> z) {
  const auto c = series.coeffs();
  std::complex<double> acc{0.0, 0.0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

inline double evaluate(const TruncatedSeries& series, double z) {
  const auto c = series.coeffs();
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

namespace detail {

// acc[k] += weight * sum_{j} a[j] b[k-j] for k <= acc.size()-1.
inline void convolve_add(std::span<double> acc, std::span<const double> a, std::span<const double> b,
                         double weight) {
  if (weight == 0.0) return;
  const std::size_t n = acc.size();
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i] == 0.0) continue;
    const double wa = weight * a[i];
    const std::size_t jmax = std::min(b.size(), n - i);
    for (std::size_t j = 0; j < jmax; ++j) acc[i + j] += wa * b[j];
  }
}

}  // namespace detail

// Product of two series, truncated at the smaller k_max.
inline TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b) {
  std::vector<double> out(std::min(a.k_max(), b.k_max()) + 1, 0.0);
  detail::convolve_add(out, a.coeffs(), b.coeffs(), 1.0);
  return TruncatedSeries(std::move(out));
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  // Bound on the contribution of the truncated tail, assuming geometric decay.
  double mean_error = 0.0;
  double variance_error = 0.0;
};

inline constexpr double kMomentTailLimit = 1e-6;

inline Moments moments(const TruncatedSeries& series) {
  const double tail = series.tail_mass();
  if (tail >= kMomentTailLimit)
    throw InsufficientTruncation("tail mass " + std::to_string(tail) +
                                 " too large for moments; raise k_max");
  const auto c = series.coeffs();
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kd = static_cast<double>(k);
    m1 += kd * c[k];
    m2 += kd * kd * c[k];
  }
  Moments out;
  out.mean = m1;
  out.variance = std::max(0.0, m2 - m1 * m1);

  // Decay rate from the last two windows of 10 coefficients (robust to parity gaps).
  const std::size_t K = series.k_max();
  double rho = 0.0;
  if (K >= 20) {
    double last = 0.0;
    double prev = 0.0;
    for (std::size_t k = K - 9; k <= K; ++k) last += c[k];
    for (std::size_t k = K - 19; k <= K - 10; ++k) prev += c[k];
    if (prev > 0.0 && last > 0.0) rho = std::min(std::pow(last / prev, 0.1), 1.0 - 1e-12);
  }
  const double t = std::max(tail, 0.0);
  const double span = static_cast<double>(K + 1) + 1.0 / (1.0 - rho);
  out.mean_error = t * span;
  out.variance_error = t * span * span + 2.0 * out.mean * out.mean_error;
  return out;
}

}  // namespace cgf
