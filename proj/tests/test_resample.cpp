#include <gtest/gtest.h>

#include <numbers>

#include "modestoa/common.hpp"
#include "modestoa/resample.hpp"
#include "modestoa/rng.hpp"

using namespace modestoa;

namespace {

using cd = std::complex<double>;

std::vector<cd> tone(std::size_t L, double cycles, double frac_offset = 0.0, int N = 1) {
  std::vector<cd> x(L * static_cast<std::size_t>(N));
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double n = static_cast<double>(j) / N + frac_offset;
    x[j] = std::polar(1.0, 2.0 * std::numbers::pi * cycles * n / static_cast<double>(L));
  }
  return x;
}

SampleWindow window_of(std::vector<cd> x) {
  SampleWindow w;
  w.samples = std::move(x);
  w.origin_time = 1e-3;
  w.coarse_time = 1e-3 + 8 / 2.4e6;
  return w;
}

}  // namespace

TEST(Resample, SpectralExactOnPeriodicTones) {
  for (int N : {2, 25, 83}) {
    for (double k : {1.0, 5.0, -9.0}) {
      const auto up = upsample_spectral(tone(64, k), N);
      const auto ref = tone(64, k, 0.0, N);
      ASSERT_EQ(up.size(), ref.size());
      for (std::size_t j = 0; j < up.size(); ++j) ASSERT_LT(std::abs(up[j] - ref[j]), 1e-10);
    }
  }
}

TEST(Resample, BothMethodsKeepNativeSamples) {
  auto rng = make_rng(2, RngDomain::Test);
  std::normal_distribution<double> g;
  std::vector<cd> x(100);
  for (auto& v : x) v = {g(rng), g(rng)};
  for (int N : {3, 25}) {
    const auto s = upsample_spectral(x, N);
    const auto p = upsample_polyphase(x, N);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_LT(std::abs(s[i * N] - x[i]), 1e-10);
      EXPECT_LT(std::abs(p[i * N] - x[i]), 1e-12);
    }
  }
}

TEST(Resample, PolyphaseMatchesSpectralInTheInterior) {
  // Slow tone, well inside the interpolator's passband.
  const auto x = tone(256, 12.0);
  const auto s = upsample_spectral(x, 25);
  const auto p = upsample_polyphase(x, 25);
  for (std::size_t j = 40 * 25; j < 216 * 25; ++j) ASSERT_LT(std::abs(s[j] - p[j]), 2e-3);
}

TEST(Resample, WindowMetadata) {
  const auto up = upsample(window_of(tone(64, 3.0)), 25);
  EXPECT_EQ(up.upsampling, 25);
  EXPECT_EQ(up.samples.size(), 64u * 25u);
  EXPECT_DOUBLE_EQ(up.origin_time, 1e-3);
  EXPECT_NEAR(up.step(), 1.0 / 60e6, 1e-20);
  EXPECT_EQ(up.usable_begin(), 100u);
  EXPECT_EQ(up.usable_end(), 64u * 25u - 100u);
  const auto mag = up.magnitude();
  for (double m : mag) EXPECT_NEAR(m, 1.0, 1e-9);
}

TEST(Resample, RejectsBadArguments) {
  EXPECT_THROW(upsample(window_of(tone(64, 1.0)), 0), InvalidInput);
  EXPECT_THROW(upsample(window_of(tone(64, 1.0)), 129), InvalidInput);
  EXPECT_THROW(upsample(window_of(tone(16, 1.0)), 25), InvalidInput);
}

TEST(Resample, FactorOneIsIdentity) {
  const auto x = tone(50, 4.0);
  const auto up = upsample(window_of(x), 1);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT(std::abs(up.samples[i] - x[i]), 1e-12);
}
