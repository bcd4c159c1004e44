#pragma once

// Sub-sample TOA estimators on an upsampled packet window.
//
// Whole-packet correlators (CorrPacket/R, CorrPacket/S, CorrPartial) slide a
// nominal template over |s'| and take the argmax. Per-pulse estimators
// (CorrPulse/R, CorrPulse/S, PeakPulse) locate each pulse on its own and
// combine the positions as
//
//   t = tau_1 + 1/(K-1) * sum_{k>=2} dtau_k,   dtau_k = (tau_k_hat - tau_1_hat) - tau_k
//
// where tau_k is the nominal start of pulse k from the packet start. Search
// windows for individual pulses are centred on a rectangular whole-packet
// correlation (the "anchor"), which removes the coarse timestamp's
// +-1 sample uncertainty before the narrow +-0.25 us searches.
//
// All TOAs are packet starts on the receiver's clock, in seconds.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modestoa/resample.hpp"
#include "modestoa/signal_model.hpp"

namespace modestoa {

enum class Method : std::uint8_t { Legacy, CorrPacketR, CorrPacketS, CorrPartial, CorrPulseR, CorrPulseS, PeakPulse };

/// Display name, e.g. "CorrPulse/S".
const char* display_name(Method m);
/// Command-line name, e.g. "corr_pulse_s".
const char* cli_name(Method m);
/// Accepts either form. nullopt for unknown names.
std::optional<Method> parse_method(std::string_view name);
std::span<const Method> all_methods();
/// Methods with a fixed upsampling factor (Legacy: 1, CorrPartial: 25).
std::optional<int> fixed_upsampling(Method m);

inline constexpr int kPartialUpsampling = 25;

struct ToaOptions {
  double pulse_search_half_width = 0.25e-6;
  double packet_search_half_width = 1.0e-6;
  double max_pulse_shift = 0.5e-6;
  double max_excluded_fraction = 0.25;
  /// Three-point parabolic refinement of the argmax (off in all reported runs).
  bool parabolic = false;
};

struct PacketMetrics {
  double gamma = 0.0;  // mean squared pulse height, full scale = 1
  int beta = 0;        // pulses touching a saturated native sample
};

struct ToaEstimate {
  double toa_seconds = 0.0;
  Method method = Method::Legacy;
  int N = 1;
  int pulses_used = 0;
  int pulses_excluded = 0;
  PacketMetrics metrics;
  bool unreliable = false;
  bool boundary = false;  // correlation peak on the search-range edge
};

/// Per-packet estimator state: |s'|, the pulse list and the anchor are
/// computed once and shared by every method run on the same window. Holds
/// copies, so the window may go away afterwards.
class PacketEstimator {
 public:
  PacketEstimator(const UpsampledWindow& window, const Payload& payload, ToaOptions options = {});

  ToaEstimate legacy() const;
  ToaEstimate corr_packet(ShapeVariant variant) const;
  ToaEstimate corr_partial() const;
  ToaEstimate corr_pulse(ShapeVariant variant) const;
  ToaEstimate peak_pulse() const;
  PacketMetrics metrics() const;

  ToaEstimate run(Method m) const;

  const PulseSequence& pulses() const { return pulses_; }
  /// Packet start from the rectangular whole-packet correlation.
  double anchor() const { return anchor_; }
  const std::vector<double>& magnitude() const { return mag_; }

 private:
  struct PacketFit {
    double toa;
    bool boundary;
  };
  PacketFit fit_template(const PacketTemplate& tmpl, bool binary) const;
  ToaEstimate combine_pulses(Method method, const std::vector<double>& starts, const std::vector<bool>& valid) const;
  double refine(std::span<const double> c, std::size_t i) const;

  double origin_ = 0.0;
  double coarse_ = 0.0;
  double step_ = 0.0;
  double sample_rate_ = 0.0;
  int N_ = 1;
  std::size_t native_length_ = 0;
  std::vector<std::uint8_t> saturated_;
  Payload payload_;
  ToaOptions opt_;
  PulseSequence pulses_;
  std::vector<double> mag_;  // |s'| with the edge guard zeroed
  double anchor_ = 0.0;
  bool anchor_boundary_ = false;
};

// Free-function forms; each builds its own PacketEstimator.
ToaEstimate corr_packet(const UpsampledWindow& window, const Payload& payload, ShapeVariant variant,
                        const ToaOptions& options = {});
/// Requires window.upsampling == 25.
ToaEstimate corr_partial(const UpsampledWindow& window, const Payload& payload, const ToaOptions& options = {});
ToaEstimate corr_pulse(const UpsampledWindow& window, const Payload& payload, ShapeVariant variant,
                       const ToaOptions& options = {});
ToaEstimate peak_pulse(const UpsampledWindow& window, const Payload& payload, const ToaOptions& options = {});
PacketMetrics packet_metrics(const UpsampledWindow& window, const Payload& payload);

/// Preamble plus the first ceil(bits/4) payload symbols. A Type-II pulse cut
/// by the boundary keeps only its first chip.
PulseSequence partial_pulses(const Payload& payload);

/// Shift-averaging combination of pulse start estimates (seconds, any common origin)
/// with nominal starts tau. Pulses with valid[k] == false are skipped; the
/// first pulse must be valid.
double combine_pulse_shifts(std::span<const double> tau_hat, std::span<const double> tau,
                            const std::vector<bool>& valid);

}  // namespace modestoa
