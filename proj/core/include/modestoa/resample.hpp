#pragma once

// Integer-factor band-limited upsampling of a packet window (complex IQ).
//
// The spectral method zero-pads the window's DFT; the polyphase method
// convolves with a Kaiser-windowed sinc. Both keep native sample i at
// upsampled index i * N, so origin_time is unchanged.

#include <complex>
#include <cstdint>
#include <vector>

#include "modestoa/receiver.hpp"

namespace modestoa {

enum class UpsampleMethod : std::uint8_t { Spectral, Polyphase };

inline constexpr int kMaxUpsampling = 128;
inline constexpr std::size_t kMinWindowSamples = 32;
/// Native samples at each end whose upsamples estimators must ignore.
inline constexpr int kEdgeGuardSamples = 4;

struct UpsampledWindow {
  std::vector<std::complex<double>> samples;
  int upsampling = 1;
  double sample_rate_hz = kDefaultSampleRate;  // native f_s
  double origin_time = 0.0;
  double coarse_time = 0.0;
  std::int64_t source_start_index = 0;
  std::size_t source_length = 0;
  std::vector<std::uint8_t> source_saturated;  // native-grid saturation mask

  double step() const { return 1.0 / (upsampling * sample_rate_hz); }
  double time_of(std::size_t j) const { return origin_time + static_cast<double>(j) * step(); }
  std::vector<double> magnitude() const;
  /// Usable upsample index range [first, last) excluding the edge guard.
  std::size_t usable_begin() const { return static_cast<std::size_t>(kEdgeGuardSamples * upsampling); }
  std::size_t usable_end() const {
    const auto guard = static_cast<std::size_t>(kEdgeGuardSamples * upsampling);
    return samples.size() > guard ? samples.size() - guard : 0;
  }
};

/// Throws InvalidInput if N is outside [1, 128] or the window is shorter than 32 samples.
UpsampledWindow upsample(const SampleWindow& window, int N, UpsampleMethod method = UpsampleMethod::Spectral);

/// Spectral interpolation of a periodic sequence: output length N * x.size().
std::vector<std::complex<double>> upsample_spectral(const std::vector<std::complex<double>>& x, int N);
/// Kaiser-windowed sinc interpolation; zero beyond the input ends.
std::vector<std::complex<double>> upsample_polyphase(const std::vector<std::complex<double>>& x, int N);

}  // namespace modestoa
