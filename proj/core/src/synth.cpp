#include "modestoa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "modestoa/parallel.hpp"
#include "modestoa/rng.hpp"

namespace modestoa {

namespace {

// Integral over [u, v] of the linear segment from (p, xp) to (q, xq).
double segment_integral(double p, double q, double xp, double xq, double u, double v) {
  const double lo = std::max(u, p);
  const double hi = std::min(v, q);
  if (hi <= lo || q <= p) return 0.0;
  const double slope = (xq - xp) / (q - p);
  const double a = xp + slope * (lo - p);
  const double b = xp + slope * (hi - p);
  return 0.5 * (hi - lo) * (a + b);
}

struct Trapezoid {
  double t0, t1, t2, t3, amplitude;

  double integral(double u, double v) const {
    return segment_integral(t0, t1, 0.0, amplitude, u, v) + segment_integral(t1, t2, amplitude, amplitude, u, v) +
           segment_integral(t2, t3, amplitude, 0.0, u, v);
  }
};

double draw_jitter(std::mt19937_64& rng, const TxImpairments& imp) {
  if (imp.jitter_bound_s <= 0.0) return 0.0;
  if (imp.jitter_distribution == JitterDistribution::Uniform) {
    return std::uniform_real_distribution<double>(-imp.jitter_bound_s, imp.jitter_bound_s)(rng);
  }
  std::normal_distribution<double> normal(0.0, imp.jitter_bound_s / 2.0);
  for (;;) {
    const double j = normal(rng);
    if (std::abs(j) <= imp.jitter_bound_s) return j;
  }
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double packet_duration(int bits) { return kPreambleDuration + bits * kSymbolPeriod; }

}  // namespace

// ---------------------------------------------------------------------------
// Parameter validation
// ---------------------------------------------------------------------------

void TxImpairments::validate() const {
  if (jitter_bound_s < 0.0 || jitter_bound_s > 50e-9 + 1e-15) throw InvalidInput("jitter bound must be in [0, 50 ns]");
  if (rise_time_s < 0.0 || rise_time_s > 50e-9 + 1e-15) throw InvalidInput("rise time must be in [0, 50 ns]");
  if (decay_time_s < 0.0 || decay_time_s > 150e-9 + 1e-15) throw InvalidInput("decay time must be in [0, 150 ns]");
  if (amplitude_variation_db < 0.0 || amplitude_variation_db > 2.0 + 1e-12) {
    throw InvalidInput("amplitude variation must be in [0, 2 dB]");
  }
}

void FrontEndParams::validate() const {
  if (!(sample_rate_hz > 0.0)) throw InvalidInput("sample rate must be positive");
  if (adc_bits != 0 && (adc_bits < 4 || adc_bits > 16)) throw InvalidInput("adc_bits must be 0 or in [4, 16]");
  if (!(gain > 0.0)) throw InvalidInput("gain must be positive");
  if (!(filter_passband_hz > 0.0)) throw InvalidInput("filter passband must be positive");
  if (noise_sigma < 0.0) throw InvalidInput("noise sigma must be non-negative");
}

double ClockModel::deterministic(double t) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double ClockModel::max_rate(double horizon) const {
  double best = 0.0;
  constexpr int kProbes = 1000;
  for (int i = 0; i <= kProbes; ++i) {
    const double t = horizon * i / kProbes;
    double d = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 1;) d = d * t + static_cast<double>(k) * coefficients[k];
    best = std::max(best, std::abs(d));
  }
  return best;
}

void Scenario::validate() const {
  if (!(duration_s > 0.0)) throw InvalidInput("duration must be positive");
  if (payload_bits != 56 && payload_bits != 112) throw InvalidInput("payload_bits must be 56 or 112");
  if (schedule.explicit_times_s.empty() && !(schedule.poisson_rate_hz > 0.0)) {
    throw InvalidInput("schedule needs a Poisson rate or explicit times");
  }
  if (schedule.explicit_times_s.empty() && schedule.dead_time_s < packet_duration(payload_bits)) {
    throw InvalidInput("dead time must be at least one packet duration");
  }
  if (amplitude_mix.empty()) throw InvalidInput("amplitude mix is empty");
  for (const auto& c : amplitude_mix) {
    if (!(c.weight > 0.0) || !(c.min > 0.0) || c.max < c.min) throw InvalidInput("bad amplitude mix component");
  }
  for (const auto& p : explicit_payloads) {
    if (static_cast<int>(p.size()) != payload_bits) throw InvalidInput("explicit payload length mismatch");
  }
  tx.validate();
  for (const auto& rx : receivers) {
    rx.frontend.validate();
    if (rx.frontend.sample_rate_hz != receivers[0].frontend.sample_rate_hz) {
      throw InvalidInput("both receivers must share the sample rate");
    }
    if (rx.clock.random_walk_sigma < 0.0) throw InvalidInput("random walk sigma must be non-negative");
  }
}

// ---------------------------------------------------------------------------
// Transmitter
// ---------------------------------------------------------------------------

PacketWaveform generate_packet_waveform(const Payload& payload, const TxImpairments& imp, std::uint64_t seed,
                                        double base_amplitude) {
  imp.validate();
  PacketWaveform wf;
  wf.pulses = extract_pulses(payload);
  const std::size_t k_count = wf.pulses.size();
  auto rng = make_rng(seed, RngDomain::TxImpairments);

  std::vector<Trapezoid> traps;
  traps.reserve(k_count);
  for (const auto& p : wf.pulses) {
    const double jitter = draw_jitter(rng, imp);
    const double rise = uniform(rng, 0.0, imp.rise_time_s);
    const double decay = uniform(rng, 0.0, imp.decay_time_s);
    const double db = uniform(rng, -imp.amplitude_variation_db / 2.0, imp.amplitude_variation_db / 2.0);
    const double amp = base_amplitude * std::pow(10.0, db / 20.0);
    const double s = p.nominal_start() + jitter;
    const double e = p.nominal_end() + jitter;
    traps.push_back({s - rise / 2, s + rise / 2, e - decay / 2, e + decay / 2, amp});
    wf.jitter_s.push_back(jitter);
    wf.rise_s.push_back(rise);
    wf.decay_s.push_back(decay);
    wf.amplitude.push_back(amp);
  }

  const double dt = wf.cell();
  const double guard = imp.jitter_bound_s + std::max(imp.rise_time_s, imp.decay_time_s) + 2.0 * dt;
  const long lead_cells = static_cast<long>(std::ceil(guard / dt));
  wf.first_time = -static_cast<double>(lead_cells) * dt;
  const double last_time = payload.duration() + guard;
  const auto cells = static_cast<std::size_t>(std::ceil((last_time - wf.first_time) / dt));
  wf.samples.assign(cells, 0.0);

  for (const auto& tr : traps) {
    const long n0 = std::max(0L, static_cast<long>(std::floor((tr.t0 - wf.first_time) / dt)));
    const long n1 = std::min(static_cast<long>(cells) - 1, static_cast<long>(std::ceil((tr.t3 - wf.first_time) / dt)));
    for (long n = n0; n <= n1; ++n) {
      const double u = wf.first_time + static_cast<double>(n) * dt;
      wf.samples[static_cast<std::size_t>(n)] += tr.integral(u, u + dt) / dt;
    }
  }
  return wf;
}

// ---------------------------------------------------------------------------
// Front end
// ---------------------------------------------------------------------------

FrontEndSignal render_frontend(const PacketWaveform& waveform, double arrival, double carrier_phase,
                               const FrontEndParams& fe, const FrontEndFilter& filter) {
  const double fs = fe.sample_rate_hz;
  const double dt = waveform.cell();
  const double span = filter.half_span();
  const double wave_begin = arrival + waveform.first_time;
  const double wave_end = wave_begin + static_cast<double>(waveform.samples.size()) * dt;

  FrontEndSignal out;
  out.first_index = static_cast<std::int64_t>(std::floor((wave_begin - span) * fs));
  const auto last_index = static_cast<std::int64_t>(std::ceil((wave_end + span) * fs));
  out.samples.assign(static_cast<std::size_t>(last_index - out.first_index + 1), {0.0, 0.0});
  const std::complex<double> rot = std::polar(fe.gain, carrier_phase);
  const auto nx = static_cast<long>(waveform.samples.size());

  // Position of output sample j on the cell grid: u_j = j*fs_ratio - A, with
  // cell n centred at u = n.
  const double ratio = waveform.sim_rate / fs;
  const double a = wave_begin / dt + 0.5;
  const bool integer_ratio = std::abs(ratio - std::round(ratio)) < 1e-9;

  if (integer_ratio) {
    const long r = std::lround(ratio);
    const double a_floor = std::floor(a);
    const double frac = a - a_floor;
    const auto base = static_cast<long>(a_floor);
    int half = 0;
    // g[m] = h((m - frac) dt) dt; output j sums x[n] g[j r - base - n].
    const auto taps = filter.sampled_taps(dt, frac, half);
    for (std::size_t jj = 0; jj < out.samples.size(); ++jj) {
      const long j = static_cast<long>(out.first_index) + static_cast<long>(jj);
      const long centre = j * r - base;
      const long n_lo = std::max(0L, centre - half);
      const long n_hi = std::min(nx - 1, centre + half);
      double acc = 0.0;
      for (long n = n_lo; n <= n_hi; ++n) {
        acc += waveform.samples[static_cast<std::size_t>(n)] * taps[static_cast<std::size_t>(centre - n + half)];
      }
      out.samples[jj] = rot * acc;
    }
    return out;
  }

  for (std::size_t jj = 0; jj < out.samples.size(); ++jj) {
    const double j = static_cast<double>(out.first_index) + static_cast<double>(jj);
    const double u = j * ratio - a;
    const long n_lo = std::max(0L, static_cast<long>(std::floor(u - span / dt)));
    const long n_hi = std::min(nx - 1, static_cast<long>(std::ceil(u + span / dt)));
    double acc = 0.0;
    for (long n = n_lo; n <= n_hi; ++n) {
      acc += waveform.samples[static_cast<std::size_t>(n)] * filter.impulse((u - static_cast<double>(n)) * dt) * dt;
    }
    out.samples[jj] = rot * acc;
  }
  return out;
}

FrontEndOutput apply_channel_and_frontend(const PacketWaveform& waveform, double delay, const FrontEndParams& fe,
                                          std::uint64_t seed, int margin) {
  fe.validate();
  if (delay < 0.0) throw InvalidInput("delay must be non-negative");
  const FrontEndFilter filter(fe.filter_passband_hz);
  auto phase_rng = make_rng(seed, RngDomain::CarrierPhase);
  const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(phase_rng);
  const auto sig = render_frontend(waveform, delay, phase, fe, filter);

  FrontEndOutput out;
  out.adc_bits = fe.adc_bits;
  out.first_index = std::max<std::int64_t>(0, sig.first_index - margin);
  const std::int64_t last = sig.first_index + static_cast<std::int64_t>(sig.samples.size()) - 1 + margin;
  out.samples.assign(static_cast<std::size_t>(last - out.first_index + 1), {0.0, 0.0});
  for (std::size_t i = 0; i < sig.samples.size(); ++i) {
    const std::int64_t j = sig.first_index + static_cast<std::int64_t>(i);
    if (j >= out.first_index) out.samples[static_cast<std::size_t>(j - out.first_index)] = sig.samples[i];
  }

  if (fe.noise_sigma > 0.0) {
    auto noise_rng = make_rng(seed, RngDomain::Noise);
    std::normal_distribution<double> normal(0.0, fe.noise_sigma * fe.gain);
    for (auto& s : out.samples) s += std::complex<double>(normal(noise_rng), normal(noise_rng));
  }

  if (fe.adc_bits > 0) {
    const AdcCodec codec{fe.adc_bits};
    out.codes.reserve(out.samples.size() * 2);
    for (auto& s : out.samples) {
      const int ci = codec.encode(s.real());
      const int cq = codec.encode(s.imag());
      out.codes.push_back(static_cast<std::uint16_t>(ci));
      out.codes.push_back(static_cast<std::uint16_t>(cq));
      s = {codec.decode(ci), codec.decode(cq)};
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-receiver traces
// ---------------------------------------------------------------------------

std::vector<double> build_schedule(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  const double dur = packet_duration(scenario.payload_bits);
  // Room at both trace ends for the front-end filter tails and receiver margins.
  const double edge = 20e-6;
  std::vector<double> times;
  if (!scenario.schedule.explicit_times_s.empty()) {
    times = scenario.schedule.explicit_times_s;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < edge || times[i] + dur + edge > scenario.duration_s) {
        throw InvalidInput("scheduled packet " + std::to_string(i) + " does not fit in the trace");
      }
      if (i > 0 && times[i] - times[i - 1] < dur) {
        throw InvalidInput("scheduled packets " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap");
      }
    }
    return times;
  }
  auto rng = make_rng(seed, RngDomain::Schedule);
  std::exponential_distribution<double> gap(scenario.schedule.poisson_rate_hz);
  double t = std::max(scenario.schedule.start_time_s, edge);
  while (t + dur + edge <= scenario.duration_s) {
    times.push_back(t);
    t += scenario.schedule.dead_time_s + gap(rng);
  }
  return times;
}

TwoReceiverTrace generate_two_receiver_trace(const Scenario& scenario, std::uint64_t seed, unsigned threads) {
  const auto times = build_schedule(scenario, seed);
  const std::size_t count = times.size();
  const double fs = scenario.receivers[0].frontend.sample_rate_hz;

  TwoReceiverTrace trace;
  trace.truth.resize(count);

  // Transmitted waveforms, shared by both receivers.
  std::vector<PacketWaveform> waves(count);
  double total_weight = 0.0;
  for (const auto& c : scenario.amplitude_mix) total_weight += c.weight;
  parallel_for(count, threads, [&](std::size_t m) {
    auto& rec = trace.truth[m];
    rec.packet_index = m;
    rec.t_m = times[m];
    if (!scenario.explicit_payloads.empty()) {
      rec.payload = scenario.explicit_payloads[m % scenario.explicit_payloads.size()];
    } else {
      auto rng = make_rng(seed, RngDomain::Payload, m);
      std::vector<std::uint8_t> bits(static_cast<std::size_t>(scenario.payload_bits));
      for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
      rec.payload = Payload::from_bits(std::move(bits));
    }
    auto arng = make_rng(seed, RngDomain::Amplitude, m);
    double pick = std::uniform_real_distribution<double>(0.0, total_weight)(arng);
    const AmplitudeComponent* comp = &scenario.amplitude_mix.back();
    for (const auto& c : scenario.amplitude_mix) {
      if (pick < c.weight) {
        comp = &c;
        break;
      }
      pick -= c.weight;
    }
    const double log_amp = uniform(arng, std::log(comp->min), std::log(comp->max));
    rec.tx_amplitude = std::exp(log_amp);
    const std::uint64_t wave_seed = make_rng(seed, RngDomain::TxImpairments, m)();
    waves[m] = generate_packet_waveform(rec.payload, scenario.tx, wave_seed, rec.tx_amplitude);
    rec.jitter_s = waves[m].jitter_s;
  });

  const auto total = static_cast<std::size_t>(std::ceil(scenario.duration_s * fs));
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& rx = scenario.receivers[i];
    const FrontEndFilter filter(rx.frontend.filter_passband_hz);

    // Receiver-clock arrivals (random walk drawn sequentially).
    auto walk_rng = make_rng(seed, RngDomain::ClockWalk, i);
    std::normal_distribution<double> normal(0.0, 1.0);
    double walk = 0.0, prev_t = 0.0;
    for (std::size_t m = 0; m < count; ++m) {
      if (rx.clock.random_walk_sigma > 0.0) {
        walk += rx.clock.random_walk_sigma * std::sqrt(times[m] - prev_t) * normal(walk_rng);
        prev_t = times[m];
      }
      trace.truth[m].true_arrival[i] = times[m] + rx.clock.deterministic(times[m]) + walk;
    }

    auto& stream = trace.streams[i];
    stream.sample_rate_hz = fs;
    stream.adc_bits = rx.frontend.adc_bits;
    stream.start_time = 0.0;
    stream.samples.assign(total, {0.0f, 0.0f});

    constexpr std::size_t kChunk = 256;
    std::vector<FrontEndSignal> rendered(kChunk);
    for (std::size_t base = 0; base < count; base += kChunk) {
      const std::size_t n = std::min(kChunk, count - base);
      parallel_for(n, threads, [&](std::size_t k) {
        const std::size_t m = base + k;
        auto prng = make_rng(seed, RngDomain::CarrierPhase, i, m);
        const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(prng);
        rendered[k] = render_frontend(waves[m], trace.truth[m].true_arrival[i], phase, rx.frontend, filter);
      });
      for (std::size_t k = 0; k < n; ++k) {
        const auto& sig = rendered[k];
        if (sig.first_index < 0 || sig.first_index + static_cast<std::int64_t>(sig.samples.size()) >
                                        static_cast<std::int64_t>(total)) {
          throw InvalidInput("packet " + std::to_string(base + k) + " falls outside receiver " + std::to_string(i + 1) +
                             "'s stream (check clock offsets against the schedule)");
        }
        auto* dst = stream.samples.data() + sig.first_index;
        for (std::size_t s = 0; s < sig.samples.size(); ++s) {
          dst[s] += std::complex<float>(static_cast<float>(sig.samples[s].real()),
                                        static_cast<float>(sig.samples[s].imag()));
        }
      }
    }

    const double sigma = rx.frontend.noise_sigma * rx.frontend.gain;
    const bool quantize = rx.frontend.adc_bits > 0;
    const AdcCodec codec{quantize ? rx.frontend.adc_bits : 8};
    constexpr std::size_t kBlock = 1 << 16;
    const std::size_t blocks = (total + kBlock - 1) / kBlock;
    parallel_for(blocks, threads, [&](std::size_t b) {
      const std::size_t lo = b * kBlock;
      const std::size_t hi = std::min(total, lo + kBlock);
      auto nrng = make_rng(seed, RngDomain::Noise, i, b);
      std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
      for (std::size_t s = lo; s < hi; ++s) {
        double re = stream.samples[s].real();
        double im = stream.samples[s].imag();
        if (sigma > 0.0) {
          re += noise(nrng);
          im += noise(nrng);
        }
        if (quantize) {
          re = codec.decode(codec.encode(re));
          im = codec.decode(codec.encode(im));
        }
        stream.samples[s] = {static_cast<float>(re), static_cast<float>(im)};
      }
    });
  }
  return trace;
}

}  // namespace modestoa
