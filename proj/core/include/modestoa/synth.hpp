#pragma once

// Synthetic two-receiver Mode S traces.
//
// Transmitter: trapezoidal pulses with per-pulse position jitter, rise/decay
// times and amplitude drawn within the Mode S tolerances, rendered on a
// 96 MHz simulation grid (cell-averaged, so sub-cell edge positions survive).
// Channel + front end: delay, random carrier phase, zero-phase low-pass,
// AWGN, sampling at f_s, gain, offset-binary quantisation with saturation.
// Receiver clocks: receiver i samples at times shifted by xi_i(t); a packet
// sent at t_m shows up at receiver-clock time t_m + xi_i(t_m).

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "modestoa/frontend_filter.hpp"
#include "modestoa/iq_io.hpp"
#include "modestoa/signal_model.hpp"

namespace modestoa {

inline constexpr double kSimulationRate = 96e6;

enum class JitterDistribution : std::uint8_t { Uniform, GaussianTruncated };

/// Per-pulse transmitter tolerances. Rise/decay draws are uniform on
/// [0, rise_time_s] and [0, decay_time_s]; amplitude draws are uniform in dB
/// on [-amplitude_variation_db / 2, +amplitude_variation_db / 2].
struct TxImpairments {
  double jitter_bound_s = 50e-9;
  double rise_time_s = 50e-9;
  double decay_time_s = 150e-9;
  double amplitude_variation_db = 2.0;
  JitterDistribution jitter_distribution = JitterDistribution::Uniform;

  static TxImpairments none() { return {0.0, 0.0, 0.0, 0.0, JitterDistribution::Uniform}; }
  void validate() const;
};

struct FrontEndParams {
  double sample_rate_hz = kDefaultSampleRate;
  int adc_bits = 8;  // 0 = no quantisation
  double gain = 1.0;
  double filter_passband_hz = 2.4e6;
  double noise_sigma = 0.0;  // per I/Q component, before gain

  void validate() const;
};

/// xi(t) = sum_k coefficients[k] * t^k, plus an optional Brownian term with
/// standard deviation random_walk_sigma * sqrt(t) (seconds).
struct ClockModel {
  std::vector<double> coefficients;
  double random_walk_sigma = 0.0;

  double deterministic(double t) const;
  /// Largest |dxi/dt| of the polynomial part over [0, horizon].
  double max_rate(double horizon) const;
};

struct PacketWaveform {
  std::vector<double> samples;  // cell averages on the simulation grid
  double sim_rate = kSimulationRate;
  double first_time = 0.0;  // left edge of cell 0, relative to nominal packet start
  PulseSequence pulses;
  std::vector<double> jitter_s;
  std::vector<double> amplitude;
  std::vector<double> rise_s;
  std::vector<double> decay_s;

  double cell() const { return 1.0 / sim_rate; }
};

PacketWaveform generate_packet_waveform(const Payload& payload, const TxImpairments& imp, std::uint64_t seed,
                                        double base_amplitude = 1.0);

/// Noiseless complex baseband at the receiver, gain applied, before the ADC.
struct FrontEndSignal {
  std::int64_t first_index = 0;
  std::vector<std::complex<double>> samples;
};

/// Filter + sample a waveform whose nominal start arrives at `arrival`
/// (seconds on the receiver's sample clock, sample j at j / f_s).
FrontEndSignal render_frontend(const PacketWaveform& waveform, double arrival, double carrier_phase,
                               const FrontEndParams& fe, const FrontEndFilter& filter);

struct FrontEndOutput {
  std::int64_t first_index = 0;
  int adc_bits = 0;
  std::vector<std::complex<double>> samples;  // normalised; ADC reconstruction levels when quantised
  std::vector<std::uint16_t> codes;           // interleaved I/Q codes, empty when unquantised
};

/// Single-packet channel: delay, random carrier phase, front-end filter,
/// AWGN, sampling, gain and ADC. Covers the packet plus `margin` samples.
FrontEndOutput apply_channel_and_frontend(const PacketWaveform& waveform, double delay, const FrontEndParams& fe,
                                          std::uint64_t seed, int margin = 16);

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

struct PacketSchedule {
  double poisson_rate_hz = 0.0;
  double dead_time_s = 150e-6;
  double start_time_s = 1e-3;
  std::vector<double> explicit_times_s;  // used when non-empty
};

/// Log-uniform component of the received-amplitude mix (full scale = 1 before gain).
struct AmplitudeComponent {
  double weight = 1.0;
  double min = 0.5;
  double max = 0.5;
};

struct ReceiverConfig {
  FrontEndParams frontend;
  ClockModel clock;
};

struct Scenario {
  double duration_s = 1.0;
  PacketSchedule schedule;
  int payload_bits = 112;
  std::vector<Payload> explicit_payloads;  // cycled if shorter than the schedule
  std::vector<AmplitudeComponent> amplitude_mix{AmplitudeComponent{}};
  TxImpairments tx;
  std::array<ReceiverConfig, 2> receivers;

  void validate() const;
};

struct TruthRecord {
  std::size_t packet_index = 0;
  double t_m = 0.0;
  Payload payload = Payload::from_bits(std::vector<std::uint8_t>(Payload::kShortBits, 0));
  std::array<double, 2> true_arrival{};  // receiver-clock arrival time, t_m + xi_i(t_m)
  std::vector<double> jitter_s;
  double tx_amplitude = 0.0;
};

struct TwoReceiverTrace {
  std::array<IqStream, 2> streams;
  std::vector<TruthRecord> truth;
};

/// Packet emission times. Throws InvalidInput if explicit times overlap
/// (gap shorter than a packet) or do not fit in the trace.
std::vector<double> build_schedule(const Scenario& scenario, std::uint64_t seed);

TwoReceiverTrace generate_two_receiver_trace(const Scenario& scenario, std::uint64_t seed, unsigned threads = 1);

}  // namespace modestoa
