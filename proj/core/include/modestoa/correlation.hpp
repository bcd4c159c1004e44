#pragma once

// Real cross-correlation c[l] = sum_j s[l + j] * t[j] over a lag range,
// with s taken as zero outside its bounds.

#include <cstddef>
#include <span>
#include <vector>

namespace modestoa {

std::vector<double> cross_correlate_direct(std::span<const double> signal, std::span<const double> tmpl,
                                           long lag_lo, long lag_hi);
std::vector<double> cross_correlate_fft(std::span<const double> signal, std::span<const double> tmpl,
                                        long lag_lo, long lag_hi);
/// Picks the direct or FFT path by operation count.
std::vector<double> cross_correlate(std::span<const double> signal, std::span<const double> tmpl, long lag_lo,
                                    long lag_hi);

/// Runs of ones in a 0/1 template, as [begin, end) index pairs.
struct BinaryRuns {
  std::vector<std::pair<long, long>> runs;
  static BinaryRuns from(std::span<const double> tmpl);
};

/// Correlation against a 0/1 template via prefix sums: O(runs) per lag.
std::vector<double> cross_correlate_binary(std::span<const double> signal, const BinaryRuns& runs, long lag_lo,
                                           long lag_hi);

/// Index of the maximum; on a plateau of equal values (within a relative
/// 1e-12) returns the plateau midpoint, rounding half down. The first
/// maximal plateau wins.
std::size_t argmax_plateau(std::span<const double> values);

/// Smallest 2^a 3^b 5^c >= n.
std::size_t next_fast_size(std::size_t n);

}  // namespace modestoa
