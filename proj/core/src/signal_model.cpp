#include "modestoa/signal_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <mutex>

#include "modestoa/frontend_filter.hpp"

namespace modestoa {

Payload Payload::from_bits(std::vector<std::uint8_t> bits) {
  if (bits.size() != kShortBits && bits.size() != kLongBits) {
    throw InvalidInput("payload must have 56 or 112 bits, got " + std::to_string(bits.size()));
  }
  for (auto b : bits) {
    if (b > 1) throw InvalidInput("payload bits must be 0 or 1");
  }
  return Payload(std::move(bits));
}

Payload Payload::from_hex(std::string_view hex) {
  if (hex.size() != kShortBits / 4 && hex.size() != kLongBits / 4) {
    throw InvalidInput("payload hex must have 14 or 28 digits, got " + std::to_string(hex.size()));
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(hex.size() * 4);
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      throw InvalidInput(std::string("invalid hex digit '") + c + "'");
    }
    for (int i = 3; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((v >> i) & 1));
  }
  return Payload(std::move(bits));
}

std::string Payload::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bits_.size() / 4);
  for (std::size_t i = 0; i < bits_.size(); i += 4) {
    const int v = (bits_[i] << 3) | (bits_[i + 1] << 2) | (bits_[i + 2] << 1) | bits_[i + 3];
    out.push_back(kDigits[v]);
  }
  return out;
}

const char* to_string(PulseKind kind) { return kind == PulseKind::TypeI ? "TypeI" : "TypeII"; }

const char* to_string(ShapeVariant variant) {
  return variant == ShapeVariant::Rectangular ? "Rectangular" : "Smoothed";
}

PulseSequence::PulseSequence(std::vector<PulseDescriptor> pulses) : pulses_(std::move(pulses)) {
  for (std::size_t k = 1; k < pulses_.size(); ++k) {
    if (pulses_[k].start_chip < pulses_[k - 1].start_chip + pulses_[k - 1].chip_count()) {
      throw InvalidInput("pulse sequence must be increasing and non-overlapping");
    }
  }
}

std::size_t PulseSequence::count(PulseKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(pulses_.begin(), pulses_.end(), [kind](const auto& p) { return p.kind == kind; }));
}

int PulseSequence::chip_span() const {
  return pulses_.empty() ? 0 : pulses_.back().start_chip + pulses_.back().chip_count();
}

std::vector<std::uint8_t> bppm_chips(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> chips(bits.size() * 2, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) chips[2 * i + (bits[i] ? 0 : 1)] = 1;
  return chips;
}

PulseSequence extract_pulses(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> chips(kPreambleChips, 0);
  for (int c : kPreambleStartChips) chips[static_cast<std::size_t>(c)] = 1;
  const auto payload_chips = bppm_chips(bits);
  chips.insert(chips.end(), payload_chips.begin(), payload_chips.end());

  std::vector<PulseDescriptor> pulses;
  pulses.reserve(chips.size() / 2);
  std::size_t c = 0;
  while (c < chips.size()) {
    if (!chips[c]) {
      ++c;
      continue;
    }
    std::size_t run = 1;
    while (c + run < chips.size() && chips[c + run]) ++run;
    // BPPM never produces three consecutive high chips.
    if (run > 2) throw InvalidInput("chip run longer than two chips");
    pulses.push_back({run == 1 ? PulseKind::TypeI : PulseKind::TypeII, static_cast<int>(c)});
    c += run;
  }
  return PulseSequence(std::move(pulses));
}

PulseSequence extract_pulses(const Payload& payload) { return extract_pulses(payload.bits()); }

std::vector<std::uint8_t> chip_occupancy(const PulseSequence& pulses, int total_chips) {
  std::vector<std::uint8_t> chips(static_cast<std::size_t>(total_chips), 0);
  for (const auto& p : pulses) {
    for (int c = p.start_chip; c < p.start_chip + p.chip_count(); ++c) {
      if (c >= 0 && c < total_chips) chips[static_cast<std::size_t>(c)] = 1;
    }
  }
  return chips;
}

GridSpan grid_span(double a, double b, double rate) {
  constexpr double kEps = 1e-9;
  return {static_cast<long>(std::ceil(a * rate - kEps)), static_cast<long>(std::floor(b * rate - kEps))};
}

// ---------------------------------------------------------------------------
// Smoothed profile
// ---------------------------------------------------------------------------

namespace {

constexpr double kProfileStep = 0.25e-9;
constexpr double kNominalRamp = 50e-9;
constexpr double kTruncation = 0.01;

}  // namespace

SmoothedPulseProfile::SmoothedPulseProfile(PulseKind kind) : dt_(kProfileStep) {
  const FrontEndFilter filter;
  const double span = filter.half_span();
  const double width = (kind == PulseKind::TypeI ? 1 : 2) * kChipPeriod;

  // Second running integral of h on [-span, span]. Beyond +span the first
  // integral is 1, so H2 grows linearly.
  const long m = static_cast<long>(std::ceil(span / dt_));
  const std::size_t n = static_cast<std::size_t>(2 * m + 1);
  std::vector<double> h1(n), h2(n);
  double prev_h = filter.impulse(-m * dt_);
  double acc1 = 0.0, acc2 = 0.0;
  h1[0] = 0.0;
  h2[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double cur_h = filter.impulse((static_cast<long>(i) - m) * dt_);
    const double next1 = acc1 + 0.5 * (prev_h + cur_h) * dt_;
    acc2 += 0.5 * (acc1 + next1) * dt_;
    acc1 = next1;
    prev_h = cur_h;
    h1[i] = acc1;
    h2[i] = acc2;
  }
  const double tail_slope = h1.back();
  const auto second_integral = [&](double x) {
    const double pos = x / dt_ + static_cast<double>(m);
    if (pos <= 0.0) return 0.0;
    if (pos >= static_cast<double>(n - 1)) return h2.back() + (pos - static_cast<double>(n - 1)) * dt_ * tail_slope;
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return h2[i] * (1.0 - f) + h2[i + 1] * f;
  };

  // Trapezoid with 50 % points at 0 and width, linear ramps of kNominalRamp.
  const double r = kNominalRamp;
  const auto response = [&](double t) {
    return (second_integral(t + r / 2) - second_integral(t - r / 2) - second_integral(t - width + r / 2) +
            second_integral(t - width - r / 2)) /
           r;
  };

  const double t0 = -span - r;
  const double t1 = width + span + r;
  const auto count = static_cast<std::size_t>(std::ceil((t1 - t0) / dt_)) + 1;
  std::vector<double> y(count);
  for (std::size_t i = 0; i < count; ++i) y[i] = std::abs(response(t0 + static_cast<double>(i) * dt_));

  const auto apex = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double peak = y[apex];
  for (auto& v : y) v /= peak;

  std::size_t lo = apex;
  while (lo > 0 && y[lo] >= kTruncation) --lo;
  std::size_t hi = apex;
  while (hi + 1 < count && y[hi] >= kTruncation) ++hi;

  begin_ = t0 + static_cast<double>(lo) * dt_;
  end_ = t0 + static_cast<double>(hi) * dt_;
  table_.assign(y.begin() + static_cast<long>(lo), y.begin() + static_cast<long>(hi) + 1);
}

const SmoothedPulseProfile& SmoothedPulseProfile::get(PulseKind kind) {
  static const SmoothedPulseProfile type1(PulseKind::TypeI);
  static const SmoothedPulseProfile type2(PulseKind::TypeII);
  return kind == PulseKind::TypeI ? type1 : type2;
}

double SmoothedPulseProfile::operator()(double t) const {
  if (t < begin_ || t > end_) return 0.0;
  const double pos = (t - begin_) / dt_;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= table_.size()) return table_.back();
  const double f = pos - static_cast<double>(i);
  return table_[i] * (1.0 - f) + table_[i + 1] * f;
}

// ---------------------------------------------------------------------------
// Shapes and templates
// ---------------------------------------------------------------------------

double PulseShape::peak_offset() const {
  if (samples.empty()) return 0.0;
  const double peak = *std::max_element(samples.begin(), samples.end());
  std::size_t first = samples.size(), last = 0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (samples[j] >= peak) {
      first = std::min(first, j);
      last = j;
    }
  }
  const double mid = 0.5 * static_cast<double>(first + last);
  return (mid - lead) * step();
}

double PulseShape::centroid() const {
  double w = 0.0, m = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    w += samples[j];
    m += samples[j] * (static_cast<double>(j) - lead);
  }
  return w > 0.0 ? m / w * step() : 0.0;
}

PulseShape build_pulse_shape(PulseKind kind, ShapeVariant variant, int upsampling, double sample_rate) {
  if (upsampling < 1) throw InvalidInput("upsampling factor must be >= 1");
  if (!(sample_rate > 0.0)) throw InvalidInput("sample rate must be positive");
  PulseShape shape{kind, variant, upsampling, sample_rate, {}, 0};
  const double rate = upsampling * sample_rate;
  const double width = (kind == PulseKind::TypeI ? 1 : 2) * kChipPeriod;
  if (variant == ShapeVariant::Rectangular) {
    shape.samples.assign(static_cast<std::size_t>(grid_span(0.0, width, rate).count()), 1.0);
    return shape;
  }
  const auto& profile = SmoothedPulseProfile::get(kind);
  const long first = static_cast<long>(std::floor(profile.support_begin() * rate));
  const long last = static_cast<long>(std::ceil(profile.support_end() * rate));
  shape.lead = static_cast<int>(-first);
  shape.samples.reserve(static_cast<std::size_t>(last - first + 1));
  for (long j = first; j <= last; ++j) shape.samples.push_back(profile(static_cast<double>(j) / rate));
  return shape;
}

PacketTemplate build_packet_template(const PulseSequence& pulses, ShapeVariant variant, int upsampling,
                                     double sample_rate) {
  if (upsampling < 1) throw InvalidInput("upsampling factor must be >= 1");
  if (!(sample_rate > 0.0)) throw InvalidInput("sample rate must be positive");
  PacketTemplate tmpl;
  const double rate = upsampling * sample_rate;
  tmpl.step = 1.0 / rate;
  if (pulses.size() == 0) return tmpl;

  if (variant == ShapeVariant::Rectangular) {
    const double end = pulses.chip_span() * kChipPeriod;
    tmpl.samples.assign(static_cast<std::size_t>(grid_span(0.0, end, rate).last + 1), 0.0);
    // Rounding moves each pulse's sampled centre off its nominal centre by up
    // to half a step. The correlation peak balances pulse edges, so the
    // template's reference is the plain mean of those per-pulse offsets.
    double offset = 0.0;
    for (const auto& p : pulses) {
      const auto span = grid_span(p.nominal_start(), p.nominal_end(), rate);
      for (long j = span.first; j <= span.last; ++j) tmpl.samples[static_cast<std::size_t>(j)] = 1.0;
      const double sampled_centre = 0.5 * static_cast<double>(span.first + span.last) * tmpl.step;
      offset += sampled_centre - (p.nominal_start() + 0.5 * p.nominal_duration());
    }
    tmpl.time_reference = offset / static_cast<double>(pulses.size());
    return tmpl;
  }

  const auto& p1 = SmoothedPulseProfile::get(PulseKind::TypeI);
  const auto& p2 = SmoothedPulseProfile::get(PulseKind::TypeII);
  const double begin = std::min(p1.support_begin(), p2.support_begin());
  const double end_time = pulses.chip_span() * kChipPeriod + std::max(p1.support_end() - kChipPeriod,
                                                                     p2.support_end() - 2 * kChipPeriod);
  const long first = static_cast<long>(std::floor(begin * rate));
  const long last = static_cast<long>(std::ceil(end_time * rate));
  tmpl.lead = static_cast<int>(-first);
  tmpl.samples.assign(static_cast<std::size_t>(last - first + 1), 0.0);
  for (const auto& p : pulses) {
    const auto& profile = SmoothedPulseProfile::get(p.kind);
    const double start = p.nominal_start();
    const long j0 = static_cast<long>(std::floor((start + profile.support_begin()) * rate));
    const long j1 = static_cast<long>(std::ceil((start + profile.support_end()) * rate));
    for (long j = j0; j <= j1; ++j) {
      tmpl.samples[static_cast<std::size_t>(j - first)] += profile(static_cast<double>(j) / rate - start);
    }
  }
  for (auto& v : tmpl.samples) v = std::min(v, 1.0);
  tmpl.time_reference = tmpl.lead * tmpl.step;
  return tmpl;
}

}  // namespace modestoa
