#pragma once

// Fourier-series inversion of a probability generating function on a circle
// of radius r < 1. The aliasing error is bounded by roughly r^(2k) / (1 - r^(2k)),
// so r = 10^(-gamma / (2k)) keeps it near 10^-gamma.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "cgf/errors.hpp"

namespace cgf {

struct InversionParams {
  std::optional<double> r;  // evaluation radius; derived from gamma when unset
  double gamma = 8.0;

  double radius_for(int k) const {
    const double rr = r ? *r : std::pow(10.0, -gamma / (2.0 * k));
    if (!(rr > 0.0 && rr < 1.0)) throw DomainError("inversion radius must lie in (0,1)");
    return rr;
  }
};

struct InversionResult {
  double probability = 0.0;  // clamped to [0,1]
  double raw = 0.0;          // value before clamping
  double radius = 0.0;
};

// Pr{L = k} ~= 1/(2k r^k) sum_{j=1}^{2k} (-1)^j Re[G(r e^{i pi j / k})].
template <class PgfEval>
InversionResult invert_fourier(PgfEval&& pgf_eval, int k, const InversionParams& params = {}) {
  if (k < 1) throw DomainError("invert_fourier: k must be >= 1 (read Pr{L=0} from the series directly)");
  if (params.gamma <= 0.0) throw DomainError("invert_fourier: gamma must be > 0");
  const double r = params.radius_for(k);
  double acc = 0.0;
  for (int j = 1; j <= 2 * k; ++j) {
    const double theta = std::numbers::pi * j / k;
    const std::complex<double> z = std::polar(r, theta);
    const double re = std::real(pgf_eval(z));
    acc += (j % 2 == 0) ? re : -re;
  }
  InversionResult out;
  out.radius = r;
  out.raw = acc / (2.0 * k * std::pow(r, k));
  out.probability = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

}  // namespace cgf
