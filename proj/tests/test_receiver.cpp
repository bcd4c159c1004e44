#include <gtest/gtest.h>

#include "modestoa/receiver.hpp"
#include "modestoa/rng.hpp"
#include "test_support.hpp"

using namespace modestoa;

TEST(Receiver, DecodesCleanTrace) {
  const auto sc = test::clean_scenario(test::spaced_times(20));
  const auto trace = generate_two_receiver_trace(sc, 4);
  ReceiverStats st;
  const auto pkts = detect_and_decode(trace.streams[0], 1, {}, &st);
  ASSERT_EQ(pkts.size(), 20u);
  EXPECT_EQ(st.decoded, 20u);
  for (std::size_t i = 0; i < pkts.size(); ++i) {
    EXPECT_EQ(pkts[i].payload, trace.truth[i].payload);
    const double err = pkts[i].coarse_timestamp - trace.truth[i].true_arrival[0];
    EXPECT_LE(std::abs(err), 1.0 / 2.4e6 + 1e-12) << "packet " << i;
    EXPECT_EQ(pkts[i].receiver_id, 1);
  }
}

TEST(Receiver, ShortPayloads) {
  auto sc = test::clean_scenario(test::spaced_times(8, 200e-6, 150e-6));
  sc.payload_bits = 56;
  const auto trace = generate_two_receiver_trace(sc, 6);
  const auto pkts = detect_and_decode(trace.streams[1], 2);
  ASSERT_EQ(pkts.size(), 8u);
  for (std::size_t i = 0; i < pkts.size(); ++i) EXPECT_EQ(pkts[i].payload, trace.truth[i].payload);
}

TEST(Receiver, QuantisedNoisyTraceStillDecodes) {
  auto sc = test::clean_scenario(test::spaced_times(30));
  sc.tx = TxImpairments{};
  for (auto& rx : sc.receivers) {
    rx.frontend.adc_bits = 8;
    rx.frontend.noise_sigma = 0.01;
  }
  const auto trace = generate_two_receiver_trace(sc, 12);
  const auto pkts = detect_and_decode(trace.streams[0]);
  ASSERT_GE(pkts.size(), 29u);
  for (const auto& p : pkts) {
    const auto it = std::find_if(trace.truth.begin(), trace.truth.end(),
                                 [&](const TruthRecord& t) { return std::abs(t.t_m - p.coarse_timestamp) < 2e-6; });
    ASSERT_NE(it, trace.truth.end());
    EXPECT_EQ(it->payload, p.payload);
  }
}

TEST(Receiver, NoiseOnlyFindsNothing) {
  IqStream s;
  s.adc_bits = 0;
  s.samples.resize(2400000);  // one second
  auto rng = make_rng(1, RngDomain::Test);
  std::normal_distribution<float> g(0.0f, 0.02f);
  for (auto& v : s.samples) v = {g(rng), g(rng)};
  EXPECT_TRUE(detect_and_decode(s).empty());
}

TEST(Receiver, WindowBounds) {
  const auto sc = test::clean_scenario(test::spaced_times(2));
  const auto trace = generate_two_receiver_trace(sc, 4);
  const auto& s = trace.streams[0];
  const auto w = packet_window(s, 1000, 112);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->start_index, 1000 - 8);
  EXPECT_EQ(w->samples.size(), static_cast<std::size_t>(8 + 288 + 8));
  EXPECT_DOUBLE_EQ(w->coarse_time, s.time_of(1000));
  EXPECT_FALSE(packet_window(s, 3, 112).has_value());
  EXPECT_FALSE(packet_window(s, static_cast<std::int64_t>(s.samples.size()) - 100, 112).has_value());
}

TEST(Receiver, PreambleTemplateHasFourPulses) {
  const auto t = preamble_template(2.4e6);
  EXPECT_EQ(t.size(), 20u);
  int rising = 0;
  for (std::size_t i = 0; i < t.size(); ++i) rising += (t[i] == 1.0 && (i == 0 || t[i - 1] == 0.0)) ? 1 : 0;
  EXPECT_EQ(rising, 4);
}
