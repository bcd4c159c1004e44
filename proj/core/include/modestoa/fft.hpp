#pragma once

#include <complex>
#include <span>

namespace modestoa {

/// In-place complex DFT (unnormalised in both directions), FFTW-backed.
/// Plans are cached per (size, direction); safe to call from several threads.
void fft_inplace(std::span<std::complex<double>> data, bool inverse);

}  // namespace modestoa
