#include "modestoa/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "modestoa/fft.hpp"

namespace modestoa {

namespace {

constexpr int kPolyphaseHalfLength = 16;  // input samples on each side
constexpr double kPolyphaseBeta = 8.0;

void check_args(std::size_t length, int N) {
  if (N < 1 || N > kMaxUpsampling) throw InvalidInput("upsampling factor must be in [1, 128]");
  if (length < kMinWindowSamples) throw InvalidInput("window must hold at least 32 samples");
}

}  // namespace

std::vector<double> UpsampledWindow::magnitude() const {
  std::vector<double> m(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) m[i] = std::abs(samples[i]);
  return m;
}

std::vector<std::complex<double>> upsample_spectral(const std::vector<std::complex<double>>& x, int N) {
  if (N == 1) return x;
  const std::size_t L = x.size();
  const std::size_t M = L * static_cast<std::size_t>(N);
  std::vector<std::complex<double>> X(x);
  fft_inplace(X, false);

  std::vector<std::complex<double>> Y(M);
  // Positive frequencies 0..ceil(L/2)-1, negative ones at the top. For even L
  // the Nyquist bin is split between +L/2 and -L/2 to keep real signals real.
  const std::size_t pos = (L + 1) / 2;
  for (std::size_t k = 0; k < pos; ++k) Y[k] = X[k];
  for (std::size_t k = L / 2 + 1; k < L; ++k) Y[M - (L - k)] = X[k];
  if (L % 2 == 0) {
    Y[L / 2] = 0.5 * X[L / 2];
    Y[M - L / 2] = 0.5 * X[L / 2];
  }
  fft_inplace(Y, true);
  const double scale = 1.0 / static_cast<double>(L);
  for (auto& v : Y) v *= scale;
  return Y;
}

std::vector<std::complex<double>> upsample_polyphase(const std::vector<std::complex<double>>& x, int N) {
  if (N == 1) return x;
  const int half = kPolyphaseHalfLength;
  const double i0b = std::cyl_bessel_i(0.0, kPolyphaseBeta);
  // taps[p][m + half] = h(m + p / N): weight of x[i - m] for the output at i + p / N.
  std::vector<std::vector<double>> phases(static_cast<std::size_t>(N));
  for (int p = 0; p < N; ++p) {
    auto& taps = phases[static_cast<std::size_t>(p)];
    taps.resize(2 * half + 1);
    for (int m = -half; m <= half; ++m) {
      const double u = m + static_cast<double>(p) / N;  // input-sample units
      const double r = u / (half + 1);
      double h = 0.0;
      if (std::abs(r) < 1.0) {
        const double sinc = u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
        h = sinc * std::cyl_bessel_i(0.0, kPolyphaseBeta * std::sqrt(1.0 - r * r)) / i0b;
      }
      taps[static_cast<std::size_t>(m + half)] = h;
    }
  }
  const auto L = static_cast<long>(x.size());
  std::vector<std::complex<double>> y(x.size() * static_cast<std::size_t>(N));
  for (long i = 0; i < L; ++i) {
    for (int p = 0; p < N; ++p) {
      const auto& taps = phases[static_cast<std::size_t>(p)];
      std::complex<double> acc = 0.0;
      for (int m = std::max(-half, static_cast<int>(i - L + 1)); m <= std::min(half, static_cast<int>(i)); ++m) {
        acc += x[static_cast<std::size_t>(i - m)] * taps[static_cast<std::size_t>(m + half)];
      }
      y[static_cast<std::size_t>(i * N + p)] = acc;
    }
  }
  return y;
}

UpsampledWindow upsample(const SampleWindow& window, int N, UpsampleMethod method) {
  check_args(window.samples.size(), N);
  UpsampledWindow out;
  out.upsampling = N;
  out.sample_rate_hz = window.sample_rate_hz;
  out.origin_time = window.origin_time;
  out.coarse_time = window.coarse_time;
  out.source_start_index = window.start_index;
  out.source_length = window.samples.size();
  out.source_saturated = window.saturated;
  out.samples = method == UpsampleMethod::Spectral ? upsample_spectral(window.samples, N)
                                                   : upsample_polyphase(window.samples, N);
  return out;
}

}  // namespace modestoa
