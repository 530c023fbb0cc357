#include "flow714/core/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "flow714/core/fft.hpp"

namespace flow714::kernels {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Work threshold below which the OpenMP dispatch is not worth the fork.
constexpr int64_t kParallelFlops = 1 << 16;

// Orthonormal DCT-II basis, row k holds the hop-sample basis vector.
std::vector<double> dct_basis(int64_t hop, int64_t coeffs) {
    std::vector<double> basis(static_cast<size_t>(coeffs) * hop);
    const double s0 = std::sqrt(1.0 / static_cast<double>(hop));
    const double sk = std::sqrt(2.0 / static_cast<double>(hop));
    for (int64_t k = 0; k < coeffs; ++k) {
        const double scale = (k == 0) ? s0 : sk;
        for (int64_t n = 0; n < hop; ++n) {
            basis[k * hop + n] =
                scale * std::cos(kPi * (2.0 * n + 1.0) * k / (2.0 * static_cast<double>(hop)));
        }
    }
    return basis;
}

}  // namespace

void matmul(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n) {
#pragma omp parallel for if (m * k * n > kParallelFlops) schedule(static)
    for (int64_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (int64_t j = 0; j < n; ++j) crow[j] = 0.0;
        const double* arow = a + i * k;
        for (int64_t l = 0; l < k; ++l) {
            const double av = arow[l];
            const double* brow = b + l * n;
            for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_nt(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n) {
#pragma omp parallel for if (m * k * n > kParallelFlops) schedule(static)
    for (int64_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (int64_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc = 0.0;
            for (int64_t l = 0; l < k; ++l) acc += arow[l] * brow[l];
            crow[j] = acc;
        }
    }
}

void matmul_tn(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n) {
#pragma omp parallel for if (m * k * n > kParallelFlops) schedule(static)
    for (int64_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (int64_t j = 0; j < n; ++j) crow[j] = 0.0;
        for (int64_t l = 0; l < k; ++l) {
            const double av = a[l * m + i];
            const double* brow = b + l * n;
            for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

std::vector<double> convolve_direct(std::span<const double> x, std::span<const double> h) {
    const int64_t nx = static_cast<int64_t>(x.size());
    const int64_t nh = static_cast<int64_t>(h.size());
    const int64_t ny = nx + nh - 1;
    std::vector<double> y(static_cast<size_t>(ny), 0.0);
    // Input-side accumulation (both arrays stride forward), blocked into
    // fixed-size output tiles so threads never share an output element and
    // the summation order is independent of the thread count.
    constexpr int64_t kTile = 4096;
    const int64_t tiles = (ny + kTile - 1) / kTile;
#pragma omp parallel for if (nx * nh > kParallelFlops) schedule(static)
    for (int64_t t = 0; t < tiles; ++t) {
        const int64_t y0 = t * kTile;
        const int64_t y1 = std::min(y0 + kTile, ny);
        const int64_t i_lo = std::max<int64_t>(0, y0 - nh + 1);
        const int64_t i_hi = std::min(nx, y1);
        for (int64_t i = i_lo; i < i_hi; ++i) {
            const double xv = x[i];
            const int64_t j0 = std::max<int64_t>(y0 - i, 0);
            const int64_t j1 = std::min<int64_t>(y1 - i, nh);
            double* yp = y.data() + i;
            for (int64_t j = j0; j < j1; ++j) yp[j] += xv * h[j];
        }
    }
    return y;
}

std::vector<double> convolve_fft(std::span<const double> x, std::span<const double> h) {
    const size_t ny = x.size() + h.size() - 1;
    size_t n = 1;
    while (n < ny) n <<= 1;
    std::vector<std::complex<double>> fx(n, {0.0, 0.0});
    std::vector<std::complex<double>> fh(n, {0.0, 0.0});
    for (size_t i = 0; i < x.size(); ++i) fx[i] = {x[i], 0.0};
    for (size_t i = 0; i < h.size(); ++i) fh[i] = {h[i], 0.0};
    fft_inplace(fx, false);
    fft_inplace(fh, false);
    for (size_t i = 0; i < n; ++i) fx[i] *= fh[i];
    fft_inplace(fx, true);
    std::vector<double> y(ny);
    for (size_t i = 0; i < ny; ++i) y[i] = fx[i].real();
    return y;
}

void dct_encode_frames(const double* audio, int64_t channels, int64_t samples, int64_t hop,
                       int64_t coeffs, double* out) {
    const int64_t frames = samples / hop;
    const std::vector<double> basis = dct_basis(hop, coeffs);
#pragma omp parallel for collapse(2) schedule(static)
    for (int64_t ch = 0; ch < channels; ++ch) {
        for (int64_t f = 0; f < frames; ++f) {
            const double* frame = audio + ch * samples + f * hop;
            for (int64_t k = 0; k < coeffs; ++k) {
                const double* bk = basis.data() + k * hop;
                double acc = 0.0;
                for (int64_t n = 0; n < hop; ++n) acc += frame[n] * bk[n];
                // Latent layout is [channel][coeff][frame].
                out[(ch * coeffs + k) * frames + f] = acc;
            }
        }
    }
}

void dct_decode_frames(const double* latent, int64_t channels, int64_t frames, int64_t hop,
                       int64_t coeffs, double* out) {
    const std::vector<double> basis = dct_basis(hop, coeffs);
    const int64_t samples = frames * hop;
#pragma omp parallel for collapse(2) schedule(static)
    for (int64_t ch = 0; ch < channels; ++ch) {
        for (int64_t f = 0; f < frames; ++f) {
            double* frame = out + ch * samples + f * hop;
            for (int64_t n = 0; n < hop; ++n) frame[n] = 0.0;
            for (int64_t k = 0; k < coeffs; ++k) {
                const double zv = latent[(ch * coeffs + k) * frames + f];
                const double* bk = basis.data() + k * hop;
                for (int64_t n = 0; n < hop; ++n) frame[n] += zv * bk[n];
            }
        }
    }
}

namespace reference {

void matmul(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n) {
    for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int64_t l = 0; l < k; ++l) acc += a[i * k + l] * b[l * n + j];
            c[i * n + j] = acc;
        }
    }
}

void matmul_nt(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n) {
    for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int64_t l = 0; l < k; ++l) acc += a[i * k + l] * b[j * k + l];
            c[i * n + j] = acc;
        }
    }
}

void matmul_tn(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n) {
    for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int64_t l = 0; l < k; ++l) acc += a[l * m + i] * b[l * n + j];
            c[i * n + j] = acc;
        }
    }
}

std::vector<double> convolve(std::span<const double> x, std::span<const double> h) {
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (size_t i = 0; i < x.size(); ++i) {
        for (size_t j = 0; j < h.size(); ++j) y[i + j] += x[i] * h[j];
    }
    return y;
}

void dct_encode_frames(const double* audio, int64_t channels, int64_t samples, int64_t hop,
                       int64_t coeffs, double* out) {
    const int64_t frames = samples / hop;
    const double s0 = std::sqrt(1.0 / static_cast<double>(hop));
    const double sk = std::sqrt(2.0 / static_cast<double>(hop));
    for (int64_t ch = 0; ch < channels; ++ch) {
        for (int64_t f = 0; f < frames; ++f) {
            for (int64_t k = 0; k < coeffs; ++k) {
                double acc = 0.0;
                for (int64_t n = 0; n < hop; ++n) {
                    acc += audio[ch * samples + f * hop + n] *
                           std::cos(kPi * (2.0 * n + 1.0) * k / (2.0 * static_cast<double>(hop)));
                }
                out[(ch * coeffs + k) * frames + f] = (k == 0 ? s0 : sk) * acc;
            }
        }
    }
}

void dct_decode_frames(const double* latent, int64_t channels, int64_t frames, int64_t hop,
                       int64_t coeffs, double* out) {
    const double s0 = std::sqrt(1.0 / static_cast<double>(hop));
    const double sk = std::sqrt(2.0 / static_cast<double>(hop));
    const int64_t samples = frames * hop;
    for (int64_t ch = 0; ch < channels; ++ch) {
        for (int64_t f = 0; f < frames; ++f) {
            for (int64_t n = 0; n < hop; ++n) {
                double acc = 0.0;
                for (int64_t k = 0; k < coeffs; ++k) {
                    acc += (k == 0 ? s0 : sk) * latent[(ch * coeffs + k) * frames + f] *
                           std::cos(kPi * (2.0 * n + 1.0) * k / (2.0 * static_cast<double>(hop)));
                }
                out[ch * samples + f * hop + n] = acc;
            }
        }
    }
}

}  // namespace reference

}  // namespace flow714::kernels
