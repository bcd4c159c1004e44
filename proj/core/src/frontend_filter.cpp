#include "modestoa/frontend_filter.hpp"

#include <cmath>
#include <numbers>

#include "modestoa/common.hpp"

namespace modestoa {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double kaiser_beta(double atten_db) {
  if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
  if (atten_db >= 21.0) return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
  return 0.0;
}

}  // namespace

FrontEndFilter::FrontEndFilter(double passband_hz, double transition_hz, double stopband_db) {
  if (!(passband_hz > 0.0) || !(transition_hz > 0.0) || transition_hz >= passband_hz / 2.0 ||
      !(stopband_db > 0.0)) {
    throw InvalidInput("FrontEndFilter: invalid passband/transition/attenuation");
  }
  stop_edge_ = passband_hz / 2.0;
  cutoff_ = stop_edge_ - transition_hz / 2.0;
  beta_ = kaiser_beta(stopband_db);
  // Kaiser length estimate L = (A - 7.95) / (2.285 dw) samples; in seconds it
  // does not depend on the sampling rate.
  const double width_rad_per_s = 2.0 * std::numbers::pi * transition_hz;
  half_span_ = (stopband_db - 7.95) / (2.285 * width_rad_per_s) / 2.0;

  // Numerical DC normalisation on a fine grid.
  const double dt = 1.0 / (2000.0 * stop_edge_);
  double acc = 0.0;
  norm_ = 1.0;
  const long m = static_cast<long>(std::ceil(half_span_ / dt));
  for (long i = -m; i <= m; ++i) acc += impulse(static_cast<double>(i) * dt) * dt;
  norm_ = 1.0 / acc;
}

double FrontEndFilter::impulse(double t) const {
  if (std::abs(t) > half_span_) return 0.0;
  const double r = t / half_span_;
  const double w = std::cyl_bessel_i(0.0, beta_ * std::sqrt(std::max(0.0, 1.0 - r * r))) /
                   std::cyl_bessel_i(0.0, beta_);
  return norm_ * 2.0 * cutoff_ * sinc(2.0 * cutoff_ * t) * w;
}

std::vector<double> FrontEndFilter::sampled_taps(double dt, double frac, int& half_taps) const {
  half_taps = static_cast<int>(std::ceil(half_span_ / dt)) + 1;
  std::vector<double> taps(static_cast<std::size_t>(2 * half_taps + 1));
  for (int m = -half_taps; m <= half_taps; ++m) {
    taps[static_cast<std::size_t>(m + half_taps)] = impulse((m - frac) * dt) * dt;
  }
  return taps;
}

}  // namespace modestoa
