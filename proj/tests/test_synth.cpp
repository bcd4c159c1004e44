#include <gtest/gtest.h>

#include <algorithm>

#include "modestoa/common.hpp"
#include "modestoa/iq_io.hpp"
#include "modestoa/synth.hpp"
#include "modestoa/toa.hpp"
#include "test_support.hpp"

using namespace modestoa;

namespace {

Scenario small_noisy(double gain = 1.0) {
  Scenario sc;
  sc.duration_s = 0.05;
  sc.schedule.poisson_rate_hz = 400;
  sc.amplitude_mix = {AmplitudeComponent{1.0, 0.3, 0.6}};
  for (auto& rx : sc.receivers) {
    rx.frontend.noise_sigma = 0.01;
    rx.frontend.gain = gain;
  }
  sc.receivers[1].clock.coefficients = {1e-6, 2e-6};
  return sc;
}

}  // namespace

TEST(Synth, ValidationRejectsOutOfTolerance) {
  TxImpairments tx;
  tx.jitter_bound_s = 60e-9;
  EXPECT_THROW(tx.validate(), InvalidInput);
  FrontEndParams fe;
  fe.adc_bits = 3;
  EXPECT_THROW(fe.validate(), InvalidInput);
  Scenario sc;
  sc.payload_bits = 64;
  EXPECT_THROW(sc.validate(), InvalidInput);
}

TEST(Synth, ExplicitScheduleOverlapRejected) {
  auto sc = test::clean_scenario({100e-6, 150e-6});
  EXPECT_THROW(build_schedule(sc, 1), InvalidInput);
}

TEST(Synth, PoissonScheduleRespectsDeadTime) {
  Scenario sc;
  sc.duration_s = 2.0;
  sc.schedule.poisson_rate_hz = 2000;
  const auto t = build_schedule(sc, 11);
  ASSERT_GT(t.size(), 1000u);
  for (std::size_t i = 1; i < t.size(); ++i) ASSERT_GE(t[i] - t[i - 1], sc.schedule.dead_time_s - 1e-12);
  EXPECT_LE(t.back() + kPreambleDuration + sc.payload_bits * kSymbolPeriod, sc.duration_s);
}

TEST(Synth, WaveformJitterWithinBound) {
  const auto p = Payload::from_hex("8D4840D6202CC371C32CE0576098");
  const auto w = generate_packet_waveform(p, TxImpairments{}, 21);
  ASSERT_EQ(w.jitter_s.size(), w.pulses.size());
  for (double j : w.jitter_s) EXPECT_LE(std::abs(j), 50e-9 + 1e-15);
  for (double a : w.amplitude) EXPECT_NEAR(20 * std::log10(a), 0.0, 1.0 + 1e-9);
  const auto clean = generate_packet_waveform(p, TxImpairments::none(), 21);
  for (double j : clean.jitter_s) EXPECT_EQ(j, 0.0);
}

TEST(Synth, TruthMatchesSchedule) {
  const auto sc = test::clean_scenario(test::spaced_times(10));
  const auto trace = generate_two_receiver_trace(sc, 3);
  ASSERT_EQ(trace.truth.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(trace.truth[i].packet_index, i);
    EXPECT_DOUBLE_EQ(trace.truth[i].t_m, sc.schedule.explicit_times_s[i]);
    EXPECT_DOUBLE_EQ(trace.truth[i].true_arrival[0], trace.truth[i].t_m);
  }
}

TEST(Synth, ClockDisplacementShowsInTruth) {
  auto sc = test::clean_scenario(test::spaced_times(5));
  sc.receivers[1].clock.coefficients = {3e-6, 1e-3};
  const auto trace = generate_two_receiver_trace(sc, 3);
  for (const auto& t : trace.truth) EXPECT_NEAR(t.true_arrival[1] - t.t_m, 3e-6 + 1e-3 * t.t_m, 1e-15);
}

TEST(Synth, DeterministicAcrossThreadCounts) {
  const auto sc = small_noisy();
  const auto a = generate_two_receiver_trace(sc, 99, 1);
  const auto b = generate_two_receiver_trace(sc, 99, 3);
  ASSERT_EQ(a.truth.size(), b.truth.size());
  for (int r = 0; r < 2; ++r) EXPECT_EQ(encode_raw_iq(a.streams[r]), encode_raw_iq(b.streams[r]));
  const auto c = generate_two_receiver_trace(sc, 100, 1);
  EXPECT_NE(encode_raw_iq(a.streams[0]), encode_raw_iq(c.streams[0]));
}

TEST(Synth, HighGainSaturates) {
  const auto trace = generate_two_receiver_trace(small_noisy(4.0), 5);
  const auto& s = trace.streams[0];
  const auto codes = encode_raw_iq(s);
  EXPECT_NE(std::find(codes.begin(), codes.end(), 255), codes.end());
  EXPECT_NE(std::find(codes.begin(), codes.end(), 0), codes.end());
}

TEST(Synth, NoiseOnlyLevelMatchesSigma) {
  Scenario sc = small_noisy();
  sc.schedule = {};
  sc.schedule.explicit_times_s = {0.04};
  sc.receivers[0].frontend.adc_bits = 0;
  const auto trace = generate_two_receiver_trace(sc, 8);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < 50000; ++i) {
    acc += std::norm(trace.streams[0].samples[i]);
    ++n;
  }
  // White noise, sigma 0.01 per component.
  EXPECT_NEAR(std::sqrt(acc / (2.0 * static_cast<double>(n))), 0.01, 0.002);
}

TEST(IqIo, RawRoundTripIsExact) {
  const auto trace = generate_two_receiver_trace(small_noisy(), 9);
  const auto& s = trace.streams[0];
  const auto bytes = encode_raw_iq(s);
  ASSERT_EQ(bytes.size(), 2 * s.samples.size());
  const auto back = decode_raw_iq(bytes, IqMetadata{s.sample_rate_hz, s.adc_bits, s.start_time});
  EXPECT_EQ(back.samples, s.samples);
  EXPECT_THROW(decode_raw_iq(std::vector<std::uint8_t>(3, 0), IqMetadata{}), DataError);
}

TEST(IqIo, AdcCodecExtremes) {
  const AdcCodec c{8};
  EXPECT_EQ(c.encode(1.5), 255);
  EXPECT_EQ(c.encode(-1.5), 0);
  EXPECT_EQ(c.encode(0.0), 128);
  EXPECT_DOUBLE_EQ(c.decode(255), 1.0);
  EXPECT_DOUBLE_EQ(c.decode(0), -1.0);
}

TEST(IqIo, FilesAndMetadata) {
  const auto dir = std::filesystem::temp_directory_path() / "modestoa_iq_test";
  std::filesystem::create_directories(dir);
  const auto trace = generate_two_receiver_trace(small_noisy(), 10);
  const auto path = dir / "rx.iq";
  write_raw_iq(path, trace.streams[1]);
  write_metadata(default_metadata_path(path), IqMetadata{2.4e6, 8, 0.0});
  const auto meta = read_metadata(default_metadata_path(path));
  EXPECT_EQ(read_raw_iq(path, meta).samples, trace.streams[1].samples);
  EXPECT_THROW(read_metadata(dir / "missing.json"), DataError);
  std::filesystem::remove_all(dir);
}
