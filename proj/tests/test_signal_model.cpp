#include <gtest/gtest.h>

#include <random>

#include "modestoa/common.hpp"
#include "modestoa/signal_model.hpp"
#include "test_support.hpp"

using namespace modestoa;

namespace {

std::vector<std::uint8_t> bits_of(unsigned value, int n) {
  std::vector<std::uint8_t> b(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = (value >> (n - 1 - i)) & 1u;
  return b;
}

std::vector<std::uint8_t> preamble_chips() {
  std::vector<std::uint8_t> c(kPreambleChips, 0);
  for (int s : kPreambleStartChips) c[static_cast<std::size_t>(s)] = 1;
  return c;
}

}  // namespace

TEST(Payload, HexRoundTrip) {
  const auto p = Payload::from_hex("8D4840D6202CC371C32CE0576098");
  EXPECT_EQ(p.size(), 112u);
  EXPECT_EQ(p.to_hex(), "8d4840d6202cc371c32ce0576098");
  EXPECT_EQ(Payload::from_hex("5D4840D6202CC3").size(), 56u);
  EXPECT_THROW(Payload::from_hex("8D48"), InvalidInput);
  EXPECT_THROW(Payload::from_hex("8D4840D6202CCZ"), InvalidInput);
  EXPECT_THROW(Payload::from_bits(std::vector<std::uint8_t>(57, 0)), InvalidInput);
  EXPECT_DOUBLE_EQ(p.duration(), 120e-6);
}

TEST(Bppm, SingleBitChips) {
  const std::uint8_t one[] = {1};
  const std::uint8_t zero[] = {0};
  EXPECT_EQ(bppm_chips(one), (std::vector<std::uint8_t>{1, 0}));
  EXPECT_EQ(bppm_chips(zero), (std::vector<std::uint8_t>{0, 1}));
}

TEST(Bppm, PreambleOnly) {
  const auto pulses = extract_pulses(std::span<const std::uint8_t>{});
  ASSERT_EQ(pulses.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(pulses[k].kind, PulseKind::TypeI);
    EXPECT_EQ(pulses[k].start_chip, kPreambleStartChips[k]);
  }
}

TEST(Bppm, ZeroOneMakesTypeII) {
  const std::uint8_t bits[] = {0, 1};
  const auto pulses = extract_pulses(bits);
  ASSERT_EQ(pulses.size(), 5u);
  EXPECT_EQ(pulses[4].kind, PulseKind::TypeII);
  EXPECT_EQ(pulses[4].start_chip, kPreambleChips + 1);
  EXPECT_DOUBLE_EQ(pulses[4].nominal_duration(), 1e-6);
}

// Every 10-bit prefix: the pulse list reproduces the direct chip encoding,
// pulses are maximal runs, and a Type-II pulse sits exactly on a "01".
TEST(Bppm, ExhaustiveTenBitPrefixes) {
  constexpr int kBits = 10;
  const int total = kPreambleChips + 2 * kBits;
  for (unsigned v = 0; v < (1u << kBits); ++v) {
    const auto bits = bits_of(v, kBits);
    const auto pulses = extract_pulses(bits);
    auto expected = preamble_chips();
    const auto body = bppm_chips(bits);
    expected.insert(expected.end(), body.begin(), body.end());
    ASSERT_EQ(chip_occupancy(pulses, total), expected) << "prefix " << v;

    for (std::size_t k = 0; k < pulses.size(); ++k) {
      const auto& p = pulses[k];
      if (k + 1 < pulses.size()) ASSERT_GT(pulses[k + 1].start_chip, p.start_chip + p.chip_count());
      if (p.kind == PulseKind::TypeII) {
        const int i = (p.start_chip - kPreambleChips - 1) / 2;
        ASSERT_EQ((p.start_chip - kPreambleChips) % 2, 1);
        ASSERT_EQ(bits[static_cast<std::size_t>(i)], 0);
        ASSERT_EQ(bits[static_cast<std::size_t>(i + 1)], 1);
      }
    }
  }
}

TEST(Bppm, RandomPayloadPulseCounts) {
  auto rng = make_rng(5, RngDomain::Test);
  double type1 = 0.0, type2 = 0.0;
  constexpr int kPackets = 4000;
  for (int i = 0; i < kPackets; ++i) {
    const auto pulses = extract_pulses(test::random_payload(rng));
    type1 += static_cast<double>(pulses.count(PulseKind::TypeI) - 4);
    type2 += static_cast<double>(pulses.count(PulseKind::TypeII));
  }
  // 111 adjacent pairs, each "01" with probability 1/4; the remaining chip
  // ones are Type-I.
  EXPECT_NEAR(type2 / kPackets, 111.0 / 4.0, 0.3);
  EXPECT_NEAR(type1 / kPackets, 112.0 - 2.0 * 111.0 / 4.0, 0.5);
}

TEST(GridSpan, EdgesAndEmpty) {
  // [0, 0.5 us) at 2.4 MHz covers samples 0 and 1 (t = 0, 0.4167 us).
  const auto s = grid_span(0.0, 0.5e-6, 2.4e6);
  EXPECT_EQ(s.first, 0);
  EXPECT_EQ(s.last, 1);
  EXPECT_EQ(grid_span(0.1e-6, 0.2e-6, 2.4e6).count(), 0);
}

TEST(PulseShape, RectangularIsBinaryWithNominalWidth) {
  for (int N : {1, 25, 83}) {
    for (auto kind : {PulseKind::TypeI, PulseKind::TypeII}) {
      const auto sh = build_pulse_shape(kind, ShapeVariant::Rectangular, N);
      double ones = 0.0;
      for (double v : sh.samples) {
        ASSERT_TRUE(v == 0.0 || v == 1.0);
        ones += v;
      }
      const double width = (kind == PulseKind::TypeI ? 0.5e-6 : 1e-6);
      EXPECT_NEAR(ones * sh.step(), width, sh.step() + 1e-15);
    }
  }
}

TEST(PulseShape, SmoothedPeaksNearCentre) {
  for (auto kind : {PulseKind::TypeI, PulseKind::TypeII}) {
    const auto sh = build_pulse_shape(kind, ShapeVariant::Smoothed, 83);
    const double peak = *std::max_element(sh.samples.begin(), sh.samples.end());
    EXPECT_NEAR(peak, 1.0, 1e-3);
    const double width = (kind == PulseKind::TypeI ? 0.5e-6 : 1e-6);
    EXPECT_NEAR(sh.centroid(), width / 2, 20e-9);
    for (double v : sh.samples) EXPECT_GE(v, 0.0);
  }
}

TEST(PacketTemplate, RectangularTimeReferenceBelowOneStep) {
  auto rng = make_rng(8, RngDomain::Test);
  for (int N : {25, 83}) {
    const auto pulses = extract_pulses(test::random_payload(rng));
    const auto t = build_packet_template(pulses, ShapeVariant::Rectangular, N);
    EXPECT_LT(std::abs(t.time_reference), t.step);
    EXPECT_EQ(t.lead, 0);
  }
}
