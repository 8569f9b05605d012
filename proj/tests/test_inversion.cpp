#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "cgf/inversion.hpp"
#include "cgf/pgf.hpp"

using namespace cgf;
using C = std::complex<double>;

TEST(Inversion, IdentityPgfAtOne) {
  const auto res = invert_fourier([](C z) { return z; }, 1);
  EXPECT_NEAR(res.probability, 1.0, 1e-14);
  EXPECT_NEAR(res.raw, 1.0, 1e-14);
}

TEST(Inversion, TwoNodeStaAtThreeSlots) {
  const auto g = sta_pgf_binary(SplitModel::fair(2), 512);
  const auto res = invert_fourier([&](C z) { return evaluate(g, z); }, 3);
  EXPECT_NEAR(res.probability, 0.5, 1e-6);
}

TEST(Inversion, AuctionFourNodesAtNineSlots) {
  const auto g = auction_pgf(SplitModel::fair(4), 512);
  const auto res = invert_fourier([&](C z) { return evaluate(g, z); }, 9);
  EXPECT_NEAR(res.probability, g[9], 1e-6);
}

TEST(Inversion, DefaultRadiusFollowsGamma) {
  InversionParams params;
  EXPECT_NEAR(params.radius_for(4), std::pow(10.0, -1.0), 1e-15);
  params.gamma = 12.0;
  EXPECT_NEAR(params.radius_for(3), std::pow(10.0, -2.0), 1e-15);
  params.r = 0.7;
  EXPECT_DOUBLE_EQ(params.radius_for(3), 0.7);
}

TEST(Inversion, ExplicitRadiusStillRecoversCoefficients) {
  const auto g = auction_skip_pgf(SplitModel::fair(3), 512);
  InversionParams params;
  params.r = 0.5;
  const auto res = invert_fourier([&](C z) { return evaluate(g, z); }, 6, params);
  // Aliasing error ~ r^(2k) times the coefficient scale.
  EXPECT_NEAR(res.probability, g[6], 1e-3);
  EXPECT_DOUBLE_EQ(res.radius, 0.5);
}

TEST(Inversion, RejectsInvalidArguments) {
  auto id = [](C z) { return z; };
  EXPECT_THROW(invert_fourier(id, 0), DomainError);
  InversionParams bad;
  bad.r = 1.0;
  EXPECT_THROW(invert_fourier(id, 2, bad), DomainError);
  bad.r = 0.0;
  EXPECT_THROW(invert_fourier(id, 2, bad), DomainError);
}

TEST(Inversion, ClampReportsRawValue) {
  // A function that is not a PGF can invert to a negative value.
  const auto res = invert_fourier([](C z) { return -z * z; }, 2);
  EXPECT_LT(res.raw, 0.0);
  EXPECT_EQ(res.probability, 0.0);
}

// Inversion of the directly evaluated rational form reproduces the series
// coefficients for every algorithm, N <= 8, k <= 30.
TEST(Inversion, ConsistentWithCoefficientExtraction) {
  for (auto alg : {Algorithm::sta, Algorithm::auction, Algorithm::auction_skip}) {
    for (int n = 0; n <= 8; ++n) {
      const auto model = SplitModel::fair(n);
      const auto series = build_pgf(alg, model, 256);
      for (int k = 1; k <= 30; ++k) {
        const auto direct = invert_fourier([&](C z) { return pgf_value(alg, model, z); }, k);
        const auto via_series = invert_fourier([&](C z) { return evaluate(series, z); }, k);
        EXPECT_NEAR(direct.probability, series[static_cast<std::size_t>(k)], 1e-6) << to_string(alg) << n << " " << k;
        EXPECT_NEAR(via_series.probability, series[static_cast<std::size_t>(k)], 1e-6);
      }
    }
  }
}
