#pragma once

// Raw IQ streams and their on-disk form.
//
// File format: interleaved unsigned I, Q, I, Q, ... with no header (RTL-SDR
// raw capture layout). 8-bit codes for adc_bits <= 8, little-endian 16-bit
// codes above that. The sample rate lives in a JSON sidecar:
//   {"sample_rate_hz": 2400000.0, "adc_bits": 8, "start_time": 0.0}

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace modestoa {

/// Offset-binary ADC mapping: code c <-> (c - h) / h with h = (2^bits - 1) / 2.
/// Full scale is +-1; the extreme codes map to exactly -1 and +1.
struct AdcCodec {
  int bits = 8;

  int max_code() const { return (1 << bits) - 1; }
  double half() const { return max_code() / 2.0; }
  int encode(double v) const;
  double decode(int code) const { return (code - half()) / half(); }
};

/// A receiver's sample stream in normalised full-scale units.
/// adc_bits == 0 marks an unquantised (analog) stream.
struct IqStream {
  double sample_rate_hz = 2.4e6;
  int adc_bits = 8;
  double start_time = 0.0;
  std::vector<std::complex<float>> samples;

  bool quantized() const { return adc_bits > 0; }
  /// I or Q at an extreme ADC code.
  bool saturated(std::size_t i) const {
    return quantized() && (std::abs(samples[i].real()) >= 1.0f || std::abs(samples[i].imag()) >= 1.0f);
  }
  double time_of(std::int64_t index) const { return start_time + static_cast<double>(index) / sample_rate_hz; }
};

struct IqMetadata {
  double sample_rate_hz = 2.4e6;
  int adc_bits = 8;
  double start_time = 0.0;
};

std::filesystem::path default_metadata_path(const std::filesystem::path& iq_path);

void write_metadata(const std::filesystem::path& path, const IqMetadata& meta);
IqMetadata read_metadata(const std::filesystem::path& path);

/// Writes codes for a quantised stream. Throws InvalidInput for analog streams.
void write_raw_iq(const std::filesystem::path& path, const IqStream& stream);
IqStream read_raw_iq(const std::filesystem::path& path, const IqMetadata& meta);

/// Serialised bytes of a quantised stream (what write_raw_iq puts on disk).
std::vector<std::uint8_t> encode_raw_iq(const IqStream& stream);
IqStream decode_raw_iq(const std::vector<std::uint8_t>& bytes, const IqMetadata& meta);

/// Writes `bytes` to a temp file next to `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t size);

}  // namespace modestoa
