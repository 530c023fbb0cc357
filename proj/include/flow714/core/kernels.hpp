#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Hot-path numeric kernels. Each parallel kernel has a plain serial twin in
// kernels::reference; the tests check the two paths agree and the bench tool
// times them side by side. The parallel versions stay bit-deterministic for
// any thread count: every output element is written by exactly one thread
// and accumulated in a fixed order.

namespace flow714::kernels {

// C[m,n] = A[m,k] * B[k,n], row-major.
void matmul(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n);

// C[m,n] = A[m,k] * B[n,k]^T.
void matmul_nt(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n);

// C[m,n] = A[k,m]^T * B[k,n].
void matmul_tn(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n);

// Full linear convolution, length x.size() + h.size() - 1.
std::vector<double> convolve_direct(std::span<const double> x, std::span<const double> h);

// FFT-based full linear convolution; agrees with convolve_direct to ~1e-9.
std::vector<double> convolve_fft(std::span<const double> x, std::span<const double> h);

// Truncated orthonormal DCT-II over non-overlapping frames of `hop` samples.
// audio is [channels][samples]; out is [channels][coeffs][frames] with
// frames = samples / hop (caller guarantees divisibility).
void dct_encode_frames(const double* audio, int64_t channels, int64_t samples, int64_t hop,
                       int64_t coeffs, double* out);

// Inverse of dct_encode_frames with coefficients coeffs..hop-1 zeroed.
// out is [channels][frames*hop].
void dct_decode_frames(const double* latent, int64_t channels, int64_t frames, int64_t hop,
                       int64_t coeffs, double* out);

namespace reference {

void matmul(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n);
void matmul_nt(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n);
void matmul_tn(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n);
std::vector<double> convolve(std::span<const double> x, std::span<const double> h);
void dct_encode_frames(const double* audio, int64_t channels, int64_t samples, int64_t hop,
                       int64_t coeffs, double* out);
void dct_decode_frames(const double* latent, int64_t channels, int64_t frames, int64_t hop,
                       int64_t coeffs, double* out);

}  // namespace reference

}  // namespace flow714::kernels
