#include "modestoa/receiver.hpp"

#include <algorithm>
#include <cmath>

namespace modestoa {

namespace {

constexpr double kQuietClearance = 0.4e-6;

// Rectangular preamble templates for a packet starting at sample n + phase;
// sample n + j sits at packet time (j - phase) / f_s.
constexpr double kTemplatePhases[] = {0.0, 0.25, 0.5, 0.75};

struct PreambleLayout {
  std::vector<double> tmpl;
  std::vector<std::size_t> high;
  std::vector<std::size_t> quiet;
  double tmpl_sum = 0.0;
  double tmpl_var = 0.0;  // sum (T - mean)^2
};

bool in_preamble_pulse(double t, double guard) {
  for (int c : kPreambleStartChips) {
    if (t >= c * kChipPeriod - guard && t < (c + 1) * kChipPeriod + guard) return true;
  }
  return false;
}

PreambleLayout make_layout(double fs, double phase) {
  PreambleLayout lay;
  const auto n = static_cast<std::size_t>(std::ceil(kPreambleDuration * fs - 1e-9));
  lay.tmpl.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) - phase) / fs;
    if (t >= 0.0 && in_preamble_pulse(t, 0.0)) {
      lay.tmpl[i] = 1.0;
      lay.high.push_back(i);
    }
    if (t >= 0.0 && t + kQuietClearance <= kPreambleDuration && !in_preamble_pulse(t, kQuietClearance)) {
      lay.quiet.push_back(i);
    }
  }
  double sum2 = 0.0;
  for (double v : lay.tmpl) {
    lay.tmpl_sum += v;
    sum2 += v * v;
  }
  lay.tmpl_var = sum2 - lay.tmpl_sum * lay.tmpl_sum / static_cast<double>(n);
  return lay;
}

class StreamView {
 public:
  explicit StreamView(const IqStream& s) : s_(s) {}

  std::size_t size() const { return s_.samples.size(); }

  // Amplitude at a fractional sample position (linear interpolation of IQ).
  double amplitude_at(double pos) const {
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double f = pos - std::floor(pos);
    const std::complex<double> a = s_.samples[i];
    const std::complex<double> b = s_.samples[i + 1];
    return std::abs(a * (1.0 - f) + b * f);
  }

 private:
  const IqStream& s_;
};

struct Decision {
  bool ok = false;
  bool ambiguous = false;
  std::vector<std::uint8_t> bits;
};

Decision decode_at(const StreamView& view, double start, double fs, const ReceiverOptions& opt) {
  Decision d;
  const double chip = kChipPeriod * fs;
  const auto chip_amp = [&](int c) { return view.amplitude_at(start + (c + 0.5) * chip); };
  const auto fits = [&](int bits) {
    return start >= 0.0 && start + (kPreambleChips + 2 * bits) * chip + 1.0 < static_cast<double>(view.size());
  };
  if (!fits(static_cast<int>(Payload::kShortBits))) return d;

  // Long or short: is there BPPM contrast in the second half?
  int bits = static_cast<int>(Payload::kShortBits);
  if (fits(static_cast<int>(Payload::kLongBits))) {
    double first = 0.0, second = 0.0;
    for (int i = 0; i < 112; ++i) {
      const double a = chip_amp(kPreambleChips + 2 * i);
      const double b = chip_amp(kPreambleChips + 2 * i + 1);
      (i < 56 ? first : second) += std::abs(a - b);
    }
    if (second > 0.5 * first) bits = static_cast<int>(Payload::kLongBits);
  }

  d.bits.resize(static_cast<std::size_t>(bits));
  for (int i = 0; i < bits; ++i) {
    const double a = chip_amp(kPreambleChips + 2 * i);
    const double b = chip_amp(kPreambleChips + 2 * i + 1);
    d.bits[static_cast<std::size_t>(i)] = a > b ? 1 : 0;
    if (std::abs(a - b) <= opt.ambiguity * std::max(a, b)) d.ambiguous = true;
  }
  d.ok = !d.ambiguous;
  return d;
}

// Sub-sample packet start: rectangular correlation of the interpolated
// amplitude with the four preamble pulses, evaluated at several points per
// chip. Unlike a chip-centre contrast, this still peaks at the pulse centres
// when the tops are flattened by ADC clipping.
double refine_start(const StreamView& view, double guess, double fs) {
  constexpr int kPointsPerChip = 6;
  const double chip = kChipPeriod * fs;
  double best_score = -1e300, best = guess;
  for (int step = -10; step <= 10; ++step) {
    const double start = guess + 0.05 * step;
    if (start < 0.0 || start + kPreambleChips * chip + 1.0 >= static_cast<double>(view.size())) continue;
    double score = 0.0;
    for (int c : kPreambleStartChips) {
      for (int k = 0; k < kPointsPerChip; ++k) {
        score += view.amplitude_at(start + (c + (k + 0.5) / kPointsPerChip) * chip);
      }
    }
    if (score > best_score) {
      best_score = score;
      best = start;
    }
  }
  return best;
}

}  // namespace

std::vector<double> preamble_template(double sample_rate) {
  const auto len = static_cast<std::size_t>(std::ceil(kPreambleDuration * sample_rate - 1e-9));
  std::vector<double> t(len, 0.0);
  for (int c : kPreambleStartChips) {
    const auto span = grid_span(c * kChipPeriod, (c + 1) * kChipPeriod, sample_rate);
    for (long j = span.first; j <= span.last; ++j) {
      if (j >= 0 && static_cast<std::size_t>(j) < len) t[static_cast<std::size_t>(j)] = 1.0;
    }
  }
  return t;
}

std::optional<SampleWindow> packet_window(const IqStream& stream, std::int64_t leading_sample_index,
                                          std::size_t payload_bits, const ReceiverOptions& options) {
  const double fs = stream.sample_rate_hz;
  const double duration = kPreambleDuration + static_cast<double>(payload_bits) * kSymbolPeriod;
  const auto body = static_cast<std::int64_t>(std::ceil(duration * fs - 1e-9));
  const std::int64_t first = leading_sample_index - options.pre_margin;
  const std::int64_t last = leading_sample_index + body + options.post_margin;  // exclusive
  if (first < 0 || last > static_cast<std::int64_t>(stream.samples.size())) return std::nullopt;

  SampleWindow w;
  w.sample_rate_hz = fs;
  w.start_index = first;
  w.origin_time = stream.time_of(first);
  w.coarse_time = stream.time_of(leading_sample_index);
  w.adc_bits = stream.adc_bits;
  w.samples.reserve(static_cast<std::size_t>(last - first));
  if (stream.quantized()) w.saturated.reserve(static_cast<std::size_t>(last - first));
  for (std::int64_t i = first; i < last; ++i) {
    const auto& s = stream.samples[static_cast<std::size_t>(i)];
    w.samples.emplace_back(s.real(), s.imag());
    if (stream.quantized()) w.saturated.push_back(stream.saturated(static_cast<std::size_t>(i)) ? 1 : 0);
  }
  return w;
}

std::vector<DecodedPacket> detect_and_decode(const IqStream& stream, int receiver_id, const ReceiverOptions& options,
                                             ReceiverStats* stats) {
  ReceiverStats local;
  auto& st = stats ? *stats : local;
  const double fs = stream.sample_rate_hz;
  std::vector<PreambleLayout> layouts;
  for (double phase : kTemplatePhases) layouts.push_back(make_layout(fs, phase));
  const std::size_t len = layouts.front().tmpl.size();
  const std::size_t total = stream.samples.size();
  std::vector<DecodedPacket> out;
  if (total < len + 2) return out;

  std::vector<float> amp(total);
  for (std::size_t i = 0; i < total; ++i) amp[i] = std::abs(stream.samples[i]);

  // Best Pearson correlation over the template phases; -1 when the contrast
  // gate fails for every phase. Also reports the winning phase.
  const auto score_at = [&](std::size_t n, double* phase = nullptr) -> double {
    double best = -1.0;
    for (std::size_t p = 0; p < layouts.size(); ++p) {
      const auto& lay = layouts[p];
      double hi = 0.0, quiet = 0.0;
      for (auto i : lay.high) hi += amp[n + i];
      for (auto i : lay.quiet) quiet += amp[n + i];
      hi /= static_cast<double>(lay.high.size());
      quiet /= static_cast<double>(lay.quiet.size());
      if (!(hi > 0.0) || hi < options.min_contrast * quiet) continue;
      double sa = 0.0, saa = 0.0, sat = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        const double a = amp[n + i];
        sa += a;
        saa += a * a;
        sat += a * lay.tmpl[i];
      }
      const double l = static_cast<double>(len);
      const double var_a = saa - sa * sa / l;
      if (var_a <= 0.0) continue;
      const double r = (sat - sa * lay.tmpl_sum / l) / std::sqrt(var_a * lay.tmpl_var);
      if (r > best) {
        best = r;
        if (phase) *phase = kTemplatePhases[p];
      }
    }
    return best;
  };

  const StreamView view(stream);
  std::size_t n = 0;
  while (n + len + 1 < total) {
    const double s = score_at(n);
    if (s < options.threshold) {
      ++n;
      continue;
    }
    ++st.candidates;
    // Argmax of the correlation in the neighbourhood of the first crossing.
    std::size_t best = n;
    double best_phase = 0.0;
    double best_score = score_at(n, &best_phase);
    for (std::size_t k = n + 1; k <= n + 3 && k + len + 1 < total; ++k) {
      double phase = 0.0;
      const double sk = score_at(k, &phase);
      if (sk > best_score) {
        best_score = sk;
        best = k;
        best_phase = phase;
      }
    }
    const double start = refine_start(view, static_cast<double>(best) + best_phase, fs);
    const auto dec = decode_at(view, start, fs, options);
    if (!dec.ok) {
      if (dec.ambiguous) ++st.ambiguous;
      ++n;
      continue;
    }
    auto window = packet_window(stream, static_cast<std::int64_t>(best), dec.bits.size(), options);
    const double duration = kPreambleDuration + static_cast<double>(dec.bits.size()) * kSymbolPeriod;
    const auto skip = static_cast<std::size_t>(std::ceil(duration * fs));
    if (!window) {
      ++st.dropped_window;
      n = best + skip;
      continue;
    }
    DecodedPacket pkt;
    pkt.payload = Payload::from_bits(dec.bits);
    pkt.leading_sample_index = static_cast<std::int64_t>(best);
    pkt.coarse_timestamp = stream.time_of(pkt.leading_sample_index);
    pkt.receiver_id = receiver_id;
    pkt.preamble_score = best_score;
    pkt.window = std::move(*window);
    out.push_back(std::move(pkt));
    ++st.decoded;
    n = best + skip;
  }
  return out;
}

}  // namespace modestoa
