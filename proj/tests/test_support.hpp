#pragma once

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "modestoa/pipeline.hpp"
#include "modestoa/rng.hpp"
#include "modestoa/synth.hpp"

namespace modestoa::test {

inline Payload random_payload(std::mt19937_64& rng, std::size_t bits = Payload::kLongBits) {
  std::vector<std::uint8_t> b(bits);
  for (auto& v : b) v = static_cast<std::uint8_t>(rng() & 1u);
  return Payload::from_bits(std::move(b));
}

/// Ideal receivers: no jitter, no noise, no quantisation, zero clocks.
inline Scenario clean_scenario(std::vector<double> times, double amplitude = 0.5) {
  Scenario sc;
  sc.schedule.explicit_times_s = std::move(times);
  sc.duration_s = sc.schedule.explicit_times_s.back() + 300e-6;
  sc.tx = TxImpairments::none();
  sc.amplitude_mix = {AmplitudeComponent{1.0, amplitude, amplitude}};
  for (auto& rx : sc.receivers) {
    rx.frontend.adc_bits = 0;
    rx.frontend.noise_sigma = 0.0;
  }
  return sc;
}

inline std::vector<double> spaced_times(std::size_t n, double first = 200e-6, double gap = 250e-6) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = first + gap * static_cast<double>(i);
  return t;
}

inline double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

inline double stddev(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace modestoa::test
