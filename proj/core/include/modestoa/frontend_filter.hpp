#pragma once

#include <vector>

namespace modestoa {

/// Linear-phase (zero-delay) Kaiser-windowed sinc low-pass used both as the
/// receiver front-end model and to derive the Smoothed pulse templates.
///
/// `passband_hz` is the two-sided complex bandwidth. The one-sided stopband
/// edge is passband_hz / 2, so a receiver sampling at passband_hz is free of
/// aliasing down to the stopband attenuation.
class FrontEndFilter {
 public:
  explicit FrontEndFilter(double passband_hz = 2.4e6, double transition_hz = 0.3e6,
                          double stopband_db = 60.0);

  /// Continuous impulse response (1/s); integrates to 1.
  double impulse(double t) const;
  /// h is zero outside [-half_span, +half_span].
  double half_span() const { return half_span_; }
  double cutoff_hz() const { return cutoff_; }
  double stopband_edge_hz() const { return stop_edge_; }

  /// Impulse response sampled at (m - frac) * dt for m in [-M, M], scaled by dt
  /// so that a discrete convolution approximates the continuous one.
  std::vector<double> sampled_taps(double dt, double frac, int& half_taps) const;

 private:
  double cutoff_;
  double stop_edge_;
  double beta_;
  double half_span_;
  double norm_;
};

}  // namespace modestoa
