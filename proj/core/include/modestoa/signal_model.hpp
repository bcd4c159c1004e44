#pragma once

// Mode S physical-layer structure: BPPM chip mapping, Type-I/Type-II pulse
// extraction, and nominal amplitude templates.
//
// Packet layout (chip = 0.5 us):
//   preamble  chips 0..15  (8 us), pulses at 0.0, 1.0, 3.5, 4.5 us
//   payload   chips 16..   two chips per bit
//     bit 1 -> first chip high,  bit 0 -> second chip high
//   A "01" bit pair puts two high chips back to back, which is a single
//   two-chip (Type-II) pulse. Every other high chip is a Type-I pulse.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modestoa/common.hpp"

namespace modestoa {

/// Decoded or synthetic Mode S payload (56 or 112 bits).
class Payload {
 public:
  static constexpr std::size_t kShortBits = 56;
  static constexpr std::size_t kLongBits = 112;

  /// Throws InvalidInput unless bits.size() is 56 or 112 and all values are 0/1.
  static Payload from_bits(std::vector<std::uint8_t> bits);
  /// 14 hex digits -> 56 bits, 28 hex digits -> 112 bits.
  static Payload from_hex(std::string_view hex);

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t size() const { return bits_.size(); }
  std::string to_hex() const;

  /// Packet duration: preamble plus one symbol per bit.
  double duration() const { return kPreambleDuration + static_cast<double>(size()) * kSymbolPeriod; }

  friend bool operator==(const Payload&, const Payload&) = default;

 private:
  explicit Payload(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}
  std::vector<std::uint8_t> bits_;
};

enum class PulseKind : std::uint8_t { TypeI, TypeII };
enum class ShapeVariant : std::uint8_t { Rectangular, Smoothed };

const char* to_string(PulseKind kind);
const char* to_string(ShapeVariant variant);

struct PulseDescriptor {
  PulseKind kind;
  int start_chip;  // chip index from packet start

  int chip_count() const { return kind == PulseKind::TypeI ? 1 : 2; }
  double nominal_start() const { return start_chip * kChipPeriod; }
  double nominal_duration() const { return chip_count() * kChipPeriod; }
  double nominal_end() const { return nominal_start() + nominal_duration(); }

  friend bool operator==(const PulseDescriptor&, const PulseDescriptor&) = default;
};

class PulseSequence {
 public:
  PulseSequence() = default;
  explicit PulseSequence(std::vector<PulseDescriptor> pulses);

  std::span<const PulseDescriptor> pulses() const { return pulses_; }
  std::size_t size() const { return pulses_.size(); }
  const PulseDescriptor& operator[](std::size_t k) const { return pulses_[k]; }
  auto begin() const { return pulses_.begin(); }
  auto end() const { return pulses_.end(); }

  std::size_t count(PulseKind kind) const;
  /// One past the last occupied chip.
  int chip_span() const;

 private:
  std::vector<PulseDescriptor> pulses_;
};

/// Preamble pulse start chips (0.0, 1.0, 3.5, 4.5 us).
inline constexpr int kPreambleStartChips[4] = {0, 2, 7, 9};

/// Direct BPPM encoding: chip occupancy of the payload bits only, two chips per bit.
std::vector<std::uint8_t> bppm_chips(std::span<const std::uint8_t> bits);

/// Pulses for preamble + arbitrary bit string. Used directly by tests on
/// short prefixes; real packets go through the Payload overload.
PulseSequence extract_pulses(std::span<const std::uint8_t> bits);
PulseSequence extract_pulses(const Payload& payload);

/// Chip occupancy (preamble included) reconstructed from a pulse sequence.
std::vector<std::uint8_t> chip_occupancy(const PulseSequence& pulses, int total_chips);

/// Nominal pulse amplitude shape on the grid t_j = (j - lead) / (N f_s),
/// where t = 0 is the nominal pulse start.
struct PulseShape {
  PulseKind kind;
  ShapeVariant variant;
  int upsampling;
  double sample_rate;  // native f_s
  std::vector<double> samples;
  int lead = 0;

  double step() const { return 1.0 / (upsampling * sample_rate); }
  /// Seconds from nominal pulse start to the shape's apex.
  double peak_offset() const;
  /// Amplitude-weighted centroid relative to nominal pulse start.
  double centroid() const;
};

/// Continuous smoothed pulse profile: front-end low-pass response to a
/// trapezoidal pulse with 50 ns rise/decay, peak normalised to 1, truncated
/// where the amplitude first drops below 1 % of peak on either side.
class SmoothedPulseProfile {
 public:
  static const SmoothedPulseProfile& get(PulseKind kind);

  /// Amplitude at time t relative to the nominal pulse start (0 outside support).
  double operator()(double t) const;
  double support_begin() const { return begin_; }
  double support_end() const { return end_; }

 private:
  explicit SmoothedPulseProfile(PulseKind kind);
  double begin_ = 0.0;
  double end_ = 0.0;
  double dt_ = 0.0;
  std::vector<double> table_;
};

/// Rectangular grid indices covered by [a, b) seconds: ceil(a r) .. floor(b r - eps).
struct GridSpan {
  long first;
  long last;  // inclusive; last < first means empty
  long count() const { return last >= first ? last - first + 1 : 0; }
};
GridSpan grid_span(double a, double b, double rate);

PulseShape build_pulse_shape(PulseKind kind, ShapeVariant variant, int upsampling,
                             double sample_rate = kDefaultSampleRate);

/// Whole-packet amplitude template. Sample j is time j / (N f_s) relative to
/// the nominal packet start; for Smoothed, sample 0 is at -lead steps.
struct PacketTemplate {
  std::vector<double> samples;
  int lead = 0;
  double step = 0.0;
  /// Seconds to add to (lag * step) to get the implied packet start:
  /// lead * step for Smoothed; for Rectangular, the mean offset of the
  /// sampled pulse centres from the nominal ones (grid rounding).
  double time_reference = 0.0;
};

PacketTemplate build_packet_template(const PulseSequence& pulses, ShapeVariant variant,
                                     int upsampling, double sample_rate = kDefaultSampleRate);

}  // namespace modestoa
