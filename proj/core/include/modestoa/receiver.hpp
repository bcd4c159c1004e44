#pragma once

// Minimal legacy Mode S receiver: finds preambles in an IQ stream, decodes the
// BPPM payload and hands out the decoded bits together with the leading
// sample index and a sample window around the packet.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "modestoa/iq_io.hpp"
#include "modestoa/signal_model.hpp"

namespace modestoa {

/// Slice of a stream around one packet, in normalised full-scale units.
struct SampleWindow {
  std::vector<std::complex<double>> samples;
  std::vector<std::uint8_t> saturated;  // per sample; empty for analog streams
  double sample_rate_hz = kDefaultSampleRate;
  std::int64_t start_index = 0;
  double origin_time = 0.0;  // time of samples[0]
  double coarse_time = 0.0;  // legacy packet start estimate
  int adc_bits = 8;

  double time_of(std::size_t i) const { return origin_time + static_cast<double>(i) / sample_rate_hz; }
};

struct DecodedPacket {
  Payload payload = Payload::from_bits(std::vector<std::uint8_t>(Payload::kShortBits, 0));
  std::int64_t leading_sample_index = 0;
  double coarse_timestamp = 0.0;
  int receiver_id = 1;
  double preamble_score = 0.0;
  SampleWindow window;
};

struct ReceiverOptions {
  /// Normalised preamble correlation needed to attempt a decode.
  double threshold = 0.75;
  /// Preamble pulse level over the quiet preamble chips.
  double min_contrast = 3.0;
  /// A symbol is ambiguous when |A - B| <= ambiguity * max(A, B).
  double ambiguity = 0.1;
  int pre_margin = 8;
  int post_margin = 8;
};

struct ReceiverStats {
  std::size_t candidates = 0;
  std::size_t decoded = 0;
  std::size_t ambiguous = 0;
  std::size_t dropped_window = 0;
};

std::vector<DecodedPacket> detect_and_decode(const IqStream& stream, int receiver_id = 1,
                                             const ReceiverOptions& options = {}, ReceiverStats* stats = nullptr);

/// Window [leading - pre_margin, leading + ceil(duration * f_s) + post_margin).
/// Returns nullopt when it would leave the stream.
std::optional<SampleWindow> packet_window(const IqStream& stream, std::int64_t leading_sample_index,
                                          std::size_t payload_bits, const ReceiverOptions& options = {});

/// Native-grid preamble template (rectangular, rounding per grid_span).
std::vector<double> preamble_template(double sample_rate);

}  // namespace modestoa
