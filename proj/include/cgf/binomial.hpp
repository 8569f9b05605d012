#pragma once

#include <algorithm>
#include <cmath>

#include "cgf/errors.hpp"

namespace cgf {

// C(n,i) p^i (1-p)^(n-i). Direct product for n <= 50, log-gamma path above.
inline double binomial_pmf(int n, int i, double p) {
  if (i < 0 || i > n) throw DomainError("binomial_pmf: index out of range");
  if (p <= 0.0) return i == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return i == n ? 1.0 : 0.0;
  if (n <= 50) {
    double c = 1.0;
    const int m = std::min(i, n - i);
    for (int j = 1; j <= m; ++j) c = c * (n - m + j) / j;
    return c * std::pow(p, i) * std::pow(1.0 - p, n - i);
  }
  const double lc = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
  return std::exp(lc + i * std::log(p) + (n - i) * std::log1p(-p));
}

// Pr{Binomial(n, p) <= k}
inline double binomial_cdf(int n, int k, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  double acc = 0.0;
  for (int i = 0; i <= k; ++i) acc += binomial_pmf(n, i, p);
  return std::min(acc, 1.0);
}

}  // namespace cgf
