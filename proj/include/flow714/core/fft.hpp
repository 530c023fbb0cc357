#pragma once

#include <complex>
#include <span>
#include <vector>

namespace flow714 {

// In-place iterative radix-2 FFT. Size must be a power of two.
// inverse=true applies the 1/N scaling.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

// Power spectrum of a real frame (bins 0..n/2 inclusive), n padded up to
// the next power of two.
std::vector<double> power_spectrum(std::span<const double> frame);

}  // namespace flow714
