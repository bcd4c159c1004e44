#include <gtest/gtest.h>

#include <random>

#include "modestoa/correlation.hpp"
#include "modestoa/rng.hpp"

using namespace modestoa;

namespace {

double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    err = std::max(err, std::abs(a[i] - b[i]));
  }
  return scale > 0.0 ? err / scale : err;
}

}  // namespace

TEST(Correlation, HandComputed) {
  const std::vector<double> s{1, 2, 3, 4};
  const std::vector<double> t{1, 1};
  EXPECT_EQ(cross_correlate_direct(s, t, -1, 3), (std::vector<double>{1, 3, 5, 7, 4}));
  const auto f = cross_correlate_fft(s, t, -1, 3);
  ASSERT_EQ(f.size(), 5u);
  EXPECT_NEAR(f[0], 1.0, 1e-12);
  EXPECT_NEAR(f[4], 4.0, 1e-12);
}

TEST(Correlation, FftMatchesDirectOnRandomWindows) {
  auto rng = make_rng(3, RngDomain::Test);
  std::uniform_int_distribution<int> len(40, 3000), tlen(5, 600);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(static_cast<std::size_t>(len(rng))), t(static_cast<std::size_t>(tlen(rng)));
    for (auto& v : s) v = std::abs(g(rng));
    for (auto& v : t) v = std::abs(g(rng));
    const long lo = -static_cast<long>(t.size()) / 2;
    const long hi = static_cast<long>(s.size()) - static_cast<long>(t.size()) / 2;
    ASSERT_LE(max_rel_error(cross_correlate_fft(s, t, lo, hi), cross_correlate_direct(s, t, lo, hi)), 1e-9);
  }
}

TEST(Correlation, BinaryPathMatchesDirect) {
  auto rng = make_rng(4, RngDomain::Test);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(900), t(300);
    for (auto& v : s) v = std::abs(g(rng));
    for (auto& v : t) v = (rng() % 3 == 0) ? 1.0 : 0.0;
    const auto runs = BinaryRuns::from(t);
    ASSERT_LE(max_rel_error(cross_correlate_binary(s, runs, -20, 700), cross_correlate_direct(s, t, -20, 700)),
              1e-12);
  }
  const std::vector<double> bad{0.0, 0.5};
  EXPECT_THROW(BinaryRuns::from(bad), std::invalid_argument);
}

TEST(Correlation, ArgmaxPlateauMidpoint) {
  EXPECT_EQ(argmax_plateau(std::vector<double>{0, 1, 3, 2}), 2u);
  EXPECT_EQ(argmax_plateau(std::vector<double>{0, 5, 5, 5, 1}), 2u);
  EXPECT_EQ(argmax_plateau(std::vector<double>{0, 5, 5, 1}), 1u);  // half rounds down
  EXPECT_EQ(argmax_plateau(std::vector<double>{5, 5, 0, 5, 5, 5}), 0u);
}

TEST(Correlation, NextFastSize) {
  EXPECT_EQ(next_fast_size(1), 1u);
  EXPECT_EQ(next_fast_size(7), 8u);
  EXPECT_EQ(next_fast_size(121), 125u);
  EXPECT_EQ(next_fast_size(1001), 1024u);
}
