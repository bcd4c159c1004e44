#include "modestoa/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "modestoa/common.hpp"
#include "modestoa/fft.hpp"

namespace modestoa {

namespace {

void check_range(long lag_lo, long lag_hi, std::size_t tmpl_size) {
  if (lag_hi < lag_lo) throw InvalidInput("empty lag range");
  if (tmpl_size == 0) throw InvalidInput("empty template");
}

double at(std::span<const double> s, long i) {
  return i >= 0 && i < static_cast<long>(s.size()) ? s[static_cast<std::size_t>(i)] : 0.0;
}

}  // namespace

std::size_t next_fast_size(std::size_t n) {
  std::size_t best = 1;
  while (best < n) best <<= 1;
  for (std::size_t p5 = 1; p5 < best; p5 *= 5) {
    for (std::size_t p35 = p5; p35 < best; p35 *= 3) {
      std::size_t v = p35;
      while (v < n) v <<= 1;
      best = std::min(best, v);
    }
  }
  return best;
}

std::vector<double> cross_correlate_direct(std::span<const double> signal, std::span<const double> tmpl, long lag_lo,
                                           long lag_hi) {
  check_range(lag_lo, lag_hi, tmpl.size());
  std::vector<double> out(static_cast<std::size_t>(lag_hi - lag_lo + 1));
  const long n = static_cast<long>(signal.size());
  const long m = static_cast<long>(tmpl.size());
  for (long l = lag_lo; l <= lag_hi; ++l) {
    const long j0 = std::max(0L, -l);
    const long j1 = std::min(m, n - l);
    double acc = 0.0;
    for (long j = j0; j < j1; ++j) acc += signal[static_cast<std::size_t>(l + j)] * tmpl[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(l - lag_lo)] = acc;
  }
  return out;
}

std::vector<double> cross_correlate_fft(std::span<const double> signal, std::span<const double> tmpl, long lag_lo,
                                        long lag_hi) {
  check_range(lag_lo, lag_hi, tmpl.size());
  const auto lags = static_cast<std::size_t>(lag_hi - lag_lo + 1);
  const std::size_t seg = lags + tmpl.size() - 1;
  const std::size_t M = next_fast_size(seg);
  // Circular correlation of the signal segment starting at lag_lo; M >= seg
  // keeps the needed lags free of wrap-around.
  std::vector<std::complex<double>> S(M), T(M);
  for (std::size_t i = 0; i < seg; ++i) S[i] = at(signal, lag_lo + static_cast<long>(i));
  for (std::size_t j = 0; j < tmpl.size(); ++j) T[j] = tmpl[j];
  fft_inplace(S, false);
  fft_inplace(T, false);
  for (std::size_t k = 0; k < M; ++k) S[k] *= std::conj(T[k]);
  fft_inplace(S, true);
  std::vector<double> out(lags);
  const double scale = 1.0 / static_cast<double>(M);
  for (std::size_t k = 0; k < lags; ++k) out[k] = S[k].real() * scale;
  return out;
}

std::vector<double> cross_correlate(std::span<const double> signal, std::span<const double> tmpl, long lag_lo,
                                    long lag_hi) {
  check_range(lag_lo, lag_hi, tmpl.size());
  const double lags = static_cast<double>(lag_hi - lag_lo + 1);
  const double direct_cost = lags * static_cast<double>(tmpl.size());
  const double M = static_cast<double>(next_fast_size(static_cast<std::size_t>(lags) + tmpl.size() - 1));
  const double fft_cost = 3.0 * 5.0 * M * std::log2(std::max(2.0, M));
  return direct_cost <= fft_cost ? cross_correlate_direct(signal, tmpl, lag_lo, lag_hi)
                                 : cross_correlate_fft(signal, tmpl, lag_lo, lag_hi);
}

BinaryRuns BinaryRuns::from(std::span<const double> tmpl) {
  BinaryRuns r;
  long begin = -1;
  for (std::size_t j = 0; j <= tmpl.size(); ++j) {
    const bool on = j < tmpl.size() && tmpl[j] != 0.0;
    if (j < tmpl.size() && on && tmpl[j] != 1.0) throw InvalidInput("template is not binary");
    if (on && begin < 0) begin = static_cast<long>(j);
    if (!on && begin >= 0) {
      r.runs.emplace_back(begin, static_cast<long>(j));
      begin = -1;
    }
  }
  return r;
}

std::vector<double> cross_correlate_binary(std::span<const double> signal, const BinaryRuns& runs, long lag_lo,
                                           long lag_hi) {
  if (lag_hi < lag_lo) throw InvalidInput("empty lag range");
  const long n = static_cast<long>(signal.size());
  std::vector<double> prefix(signal.size() + 1, 0.0);
  for (std::size_t i = 0; i < signal.size(); ++i) prefix[i + 1] = prefix[i] + signal[i];
  const auto P = [&](long i) { return prefix[static_cast<std::size_t>(std::clamp(i, 0L, n))]; };
  std::vector<double> out(static_cast<std::size_t>(lag_hi - lag_lo + 1));
  for (long l = lag_lo; l <= lag_hi; ++l) {
    double acc = 0.0;
    for (const auto& [b, e] : runs.runs) acc += P(l + e) - P(l + b);
    out[static_cast<std::size_t>(l - lag_lo)] = acc;
  }
  return out;
}

std::size_t argmax_plateau(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("argmax of empty sequence");
  const double peak = *std::max_element(values.begin(), values.end());
  const double tol = 1e-12 * std::max(1.0, std::abs(peak));
  std::size_t i = 0;
  while (values[i] < peak - tol) ++i;
  std::size_t j = i;
  while (j + 1 < values.size() && values[j + 1] >= peak - tol) ++j;
  return i + (j - i) / 2;
}

}  // namespace modestoa
