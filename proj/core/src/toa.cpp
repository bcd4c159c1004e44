#include "modestoa/toa.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "modestoa/correlation.hpp"

namespace modestoa {

namespace {

struct MethodInfo {
  Method method;
  const char* display;
  const char* cli;
};

constexpr std::array<MethodInfo, 7> kMethods{{
    {Method::Legacy, "Legacy", "legacy"},
    {Method::CorrPacketR, "CorrPacket/R", "corr_packet_r"},
    {Method::CorrPacketS, "CorrPacket/S", "corr_packet_s"},
    {Method::CorrPartial, "CorrPartial", "corr_partial"},
    {Method::CorrPulseR, "CorrPulse/R", "corr_pulse_r"},
    {Method::CorrPulseS, "CorrPulse/S", "corr_pulse_s"},
    {Method::PeakPulse, "PeakPulse", "peak_pulse"},
}};

constexpr std::array<Method, 7> kAllMethods{Method::Legacy,     Method::CorrPacketR, Method::CorrPacketS,
                                            Method::CorrPartial, Method::CorrPulseR,  Method::CorrPulseS,
                                            Method::PeakPulse};

const MethodInfo& info(Method m) { return kMethods[static_cast<std::size_t>(m)]; }

long ceil_index(double x) { return static_cast<long>(std::ceil(x - 1e-9)); }
long floor_index(double x) { return static_cast<long>(std::floor(x + 1e-9)); }

}  // namespace

const char* display_name(Method m) { return info(m).display; }
const char* cli_name(Method m) { return info(m).cli; }

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& mi : kMethods) {
    if (name == mi.display || name == mi.cli) return mi.method;
  }
  return std::nullopt;
}

std::span<const Method> all_methods() { return kAllMethods; }

std::optional<int> fixed_upsampling(Method m) {
  if (m == Method::Legacy) return 1;
  if (m == Method::CorrPartial) return kPartialUpsampling;
  return std::nullopt;
}

PulseSequence partial_pulses(const Payload& payload) {
  const auto symbols = static_cast<int>((payload.size() + 3) / 4);
  const int limit = kPreambleChips + 2 * symbols;
  std::vector<PulseDescriptor> kept;
  for (const auto& p : extract_pulses(payload)) {
    if (p.start_chip >= limit) break;
    auto q = p;
    if (q.start_chip + q.chip_count() > limit) q.kind = PulseKind::TypeI;
    kept.push_back(q);
  }
  return PulseSequence(std::move(kept));
}

double combine_pulse_shifts(std::span<const double> tau_hat, std::span<const double> tau,
                            const std::vector<bool>& valid) {
  if (tau_hat.size() != tau.size() || valid.size() != tau.size()) throw InvalidInput("pulse list size mismatch");
  if (tau.empty() || !valid[0]) throw InvalidInput("first pulse must be valid");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 1; k < tau.size(); ++k) {
    if (!valid[k]) continue;
    sum += (tau_hat[k] - tau_hat[0]) - (tau[k] - tau[0]);
    ++n;
  }
  return tau_hat[0] - tau[0] + (n > 0 ? sum / static_cast<double>(n) : 0.0);
}

PacketEstimator::PacketEstimator(const UpsampledWindow& window, const Payload& payload, ToaOptions options)
    : origin_(window.origin_time),
      coarse_(window.coarse_time),
      step_(window.step()),
      sample_rate_(window.sample_rate_hz),
      N_(window.upsampling),
      native_length_(window.source_length),
      saturated_(window.source_saturated),
      payload_(payload),
      opt_(options),
      pulses_(extract_pulses(payload)),
      mag_(window.magnitude()) {
  const auto b = std::min(window.usable_begin(), mag_.size());
  const auto e = std::max(b, window.usable_end());
  std::fill(mag_.begin(), mag_.begin() + static_cast<long>(b), 0.0);
  std::fill(mag_.begin() + static_cast<long>(e), mag_.end(), 0.0);

  const auto fit = fit_template(build_packet_template(pulses_, ShapeVariant::Rectangular, N_, sample_rate_), true);
  anchor_ = fit.toa;
  anchor_boundary_ = fit.boundary;
}

double PacketEstimator::refine(std::span<const double> c, std::size_t i) const {
  if (!opt_.parabolic || i == 0 || i + 1 >= c.size()) return 0.0;
  const double den = c[i - 1] - 2.0 * c[i] + c[i + 1];
  if (!(den < 0.0)) return 0.0;
  return std::clamp(0.5 * (c[i - 1] - c[i + 1]) / den, -0.5, 0.5);
}

PacketEstimator::PacketFit PacketEstimator::fit_template(const PacketTemplate& tmpl, bool binary) const {
  const double rel = coarse_ - origin_ - tmpl.time_reference;
  const long lo = ceil_index((rel - opt_.packet_search_half_width) / step_);
  const long hi = floor_index((rel + opt_.packet_search_half_width) / step_);
  const auto c = binary ? cross_correlate_binary(mag_, BinaryRuns::from(tmpl.samples), lo, hi)
                        : cross_correlate(mag_, tmpl.samples, lo, hi);
  const auto i = argmax_plateau(c);
  const double lag = static_cast<double>(lo + static_cast<long>(i)) + refine(c, i);
  return {origin_ + lag * step_ + tmpl.time_reference, i == 0 || i + 1 == c.size()};
}

ToaEstimate PacketEstimator::legacy() const {
  ToaEstimate est;
  est.method = Method::Legacy;
  est.N = 1;
  est.toa_seconds = coarse_;
  est.pulses_used = static_cast<int>(pulses_.size());
  return est;
}

ToaEstimate PacketEstimator::corr_packet(ShapeVariant variant) const {
  ToaEstimate est;
  est.method = variant == ShapeVariant::Rectangular ? Method::CorrPacketR : Method::CorrPacketS;
  est.N = N_;
  est.pulses_used = static_cast<int>(pulses_.size());
  if (variant == ShapeVariant::Rectangular) {
    est.toa_seconds = anchor_;
    est.boundary = anchor_boundary_;
  } else {
    const auto fit = fit_template(build_packet_template(pulses_, variant, N_, sample_rate_), false);
    est.toa_seconds = fit.toa;
    est.boundary = fit.boundary;
  }
  est.unreliable = est.boundary;
  return est;
}

ToaEstimate PacketEstimator::corr_partial() const {
  if (N_ != kPartialUpsampling) throw InvalidInput("CorrPartial runs at N = 25 only");
  const auto partial = partial_pulses(payload_);
  const auto fit = fit_template(build_packet_template(partial, ShapeVariant::Rectangular, N_, sample_rate_), true);
  ToaEstimate est;
  est.method = Method::CorrPartial;
  est.N = N_;
  est.pulses_used = static_cast<int>(partial.size());
  est.toa_seconds = fit.toa;
  est.boundary = fit.boundary;
  est.unreliable = fit.boundary;
  return est;
}

ToaEstimate PacketEstimator::combine_pulses(Method method, const std::vector<double>& starts,
                                            const std::vector<bool>& found) const {
  // starts/found are indexed like pulses_; pulses not considered by the
  // method have found == false and are not counted as excluded.
  std::vector<double> tau_hat, tau;
  std::vector<bool> valid;
  int considered = 0;
  for (std::size_t k = 0; k < pulses_.size(); ++k) {
    const bool wanted = method != Method::PeakPulse || pulses_[k].kind == PulseKind::TypeI;
    if (!wanted) continue;
    ++considered;
    tau_hat.push_back(starts[k]);
    tau.push_back(pulses_[k].nominal_start());
    valid.push_back(found[k]);
  }

  ToaEstimate est;
  est.method = method;
  est.N = N_;
  // Reference pulse: the first one, or the first usable one if it was lost.
  std::size_t ref = 0;
  while (ref < valid.size() && !valid[ref]) ++ref;
  if (ref == valid.size()) {
    est.toa_seconds = anchor_;
    est.pulses_excluded = considered;
    est.boundary = anchor_boundary_;
    est.unreliable = true;
    return est;
  }
  for (std::size_t k = 0; k < valid.size(); ++k) {
    if (!valid[k] || k == ref) continue;
    const double shift = (tau_hat[k] - tau_hat[ref]) - (tau[k] - tau[ref]);
    if (std::abs(shift) > opt_.max_pulse_shift) valid[k] = false;
  }
  std::vector<double> th(tau_hat.begin() + static_cast<long>(ref), tau_hat.end());
  std::vector<double> tn(tau.begin() + static_cast<long>(ref), tau.end());
  std::vector<bool> vd(valid.begin() + static_cast<long>(ref), valid.end());
  est.toa_seconds = combine_pulse_shifts(th, tn, vd);
  est.pulses_used = static_cast<int>(std::count(valid.begin(), valid.end(), true));
  est.pulses_excluded = considered - est.pulses_used;
  // Search windows hang off the anchor; an anchor on its range edge is suspect.
  est.boundary = anchor_boundary_;
  est.unreliable = anchor_boundary_ || est.pulses_excluded > opt_.max_excluded_fraction * considered;
  return est;
}

ToaEstimate PacketEstimator::corr_pulse(ShapeVariant variant) const {
  const Method method = variant == ShapeVariant::Rectangular ? Method::CorrPulseR : Method::CorrPulseS;
  std::vector<double> starts(pulses_.size(), 0.0);
  std::vector<bool> found(pulses_.size(), false);
  const double h = opt_.pulse_search_half_width;

  for (PulseKind kind : {PulseKind::TypeI, PulseKind::TypeII}) {
    if (pulses_.count(kind) == 0) continue;
    const auto shape = build_pulse_shape(kind, variant, N_, sample_rate_);
    const double width = (kind == PulseKind::TypeI ? 1 : 2) * kChipPeriod;
    // Pulse start implied by the shape sitting at lag l: origin + l * step + ref.
    const double ref = variant == ShapeVariant::Rectangular
                           ? 0.5 * static_cast<double>(shape.samples.size() - 1) * step_ - 0.5 * width
                           : shape.lead * step_;
    const auto lag_range = [&](const PulseDescriptor& p) {
      const double expected = anchor_ + p.nominal_start() - origin_ - ref;
      return std::pair{ceil_index((expected - h) / step_), floor_index((expected + h) / step_)};
    };
    long lo = 0, hi = -1;
    for (const auto& p : pulses_) {
      if (p.kind != kind) continue;
      const auto [a, b] = lag_range(p);
      if (hi < lo) {
        lo = a;
        hi = b;
      } else {
        lo = std::min(lo, a);
        hi = std::max(hi, b);
      }
    }
    const auto c = variant == ShapeVariant::Rectangular
                       ? cross_correlate_binary(mag_, BinaryRuns::from(shape.samples), lo, hi)
                       : cross_correlate(mag_, shape.samples, lo, hi);
    for (std::size_t k = 0; k < pulses_.size(); ++k) {
      if (pulses_[k].kind != kind) continue;
      const auto [a, b] = lag_range(pulses_[k]);
      const std::span<const double> slice(c.data() + (a - lo), static_cast<std::size_t>(b - a + 1));
      const auto i = argmax_plateau(slice);
      const bool edge = i == 0 || i + 1 == slice.size();
      starts[k] = origin_ + (static_cast<double>(a + static_cast<long>(i)) + refine(slice, i)) * step_ + ref;
      found[k] = !edge;
    }
  }
  return combine_pulses(method, starts, found);
}

ToaEstimate PacketEstimator::peak_pulse() const {
  std::vector<double> starts(pulses_.size(), 0.0);
  std::vector<bool> found(pulses_.size(), false);
  const double h = opt_.pulse_search_half_width;
  const double half_width = 0.5 * kChipPeriod;
  const long n = static_cast<long>(mag_.size());
  for (std::size_t k = 0; k < pulses_.size(); ++k) {
    if (pulses_[k].kind != PulseKind::TypeI) continue;
    const double apex = anchor_ + pulses_[k].nominal_start() + half_width - origin_;
    const long a = std::max(0L, ceil_index((apex - h) / step_));
    const long b = std::min(n - 1, floor_index((apex + h) / step_));
    if (b - a < 2) continue;
    const std::span<const double> slice(mag_.data() + a, static_cast<std::size_t>(b - a + 1));
    const auto i = argmax_plateau(slice);
    const bool edge = i == 0 || i + 1 == slice.size();
    starts[k] = origin_ + (static_cast<double>(a + static_cast<long>(i)) + refine(slice, i)) * step_ - half_width;
    found[k] = !edge;
  }
  return combine_pulses(Method::PeakPulse, starts, found);
}

PacketMetrics PacketEstimator::metrics() const {
  PacketMetrics m;
  if (pulses_.size() == 0) return m;
  const long n = static_cast<long>(mag_.size());
  double sum = 0.0;
  for (const auto& p : pulses_) {
    const double a = anchor_ + p.nominal_start() - origin_;
    const double b = anchor_ + p.nominal_end() - origin_;
    const long j0 = std::max(0L, ceil_index(a / step_));
    const long j1 = std::min(n - 1, floor_index(b / step_));
    double peak = 0.0;
    for (long j = j0; j <= j1; ++j) peak = std::max(peak, mag_[static_cast<std::size_t>(j)]);
    sum += peak * peak;

    if (!saturated_.empty()) {
      const long i0 = std::max(0L, ceil_index(a * sample_rate_));
      const long i1 = std::min(static_cast<long>(saturated_.size()) - 1, floor_index(b * sample_rate_));
      bool clipped = false;
      for (long i = i0; i <= i1 && !clipped; ++i) clipped = saturated_[static_cast<std::size_t>(i)] != 0;
      m.beta += clipped ? 1 : 0;
    }
  }
  m.gamma = sum / static_cast<double>(pulses_.size());
  return m;
}

ToaEstimate PacketEstimator::run(Method m) const {
  switch (m) {
    case Method::Legacy:
      return legacy();
    case Method::CorrPacketR:
      return corr_packet(ShapeVariant::Rectangular);
    case Method::CorrPacketS:
      return corr_packet(ShapeVariant::Smoothed);
    case Method::CorrPartial:
      return corr_partial();
    case Method::CorrPulseR:
      return corr_pulse(ShapeVariant::Rectangular);
    case Method::CorrPulseS:
      return corr_pulse(ShapeVariant::Smoothed);
    case Method::PeakPulse:
      return peak_pulse();
  }
  throw InvalidInput("unknown method");
}

ToaEstimate corr_packet(const UpsampledWindow& window, const Payload& payload, ShapeVariant variant,
                        const ToaOptions& options) {
  return PacketEstimator(window, payload, options).corr_packet(variant);
}

ToaEstimate corr_partial(const UpsampledWindow& window, const Payload& payload, const ToaOptions& options) {
  return PacketEstimator(window, payload, options).corr_partial();
}

ToaEstimate corr_pulse(const UpsampledWindow& window, const Payload& payload, ShapeVariant variant,
                       const ToaOptions& options) {
  return PacketEstimator(window, payload, options).corr_pulse(variant);
}

ToaEstimate peak_pulse(const UpsampledWindow& window, const Payload& payload, const ToaOptions& options) {
  return PacketEstimator(window, payload, options).peak_pulse();
}

PacketMetrics packet_metrics(const UpsampledWindow& window, const Payload& payload) {
  return PacketEstimator(window, payload).metrics();
}

}  // namespace modestoa
