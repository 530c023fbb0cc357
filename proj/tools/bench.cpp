// Benchmark of the parallel kernels against their serial references, plus a
// desk-profile velocity-net forward. Wall-clock only; run on an idle box.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "flow714/core/kernels.hpp"
#include "flow714/core/rng.hpp"
#include "flow714/net/velocity_field.hpp"

using namespace flow714;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void row(const char* name, double parallel_ms, double serial_ms, double flops) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx %9.2f GFLOP/s\n", name, parallel_ms,
                serial_ms, serial_ms / parallel_ms, flops / parallel_ms / 1e6);
}

}  // namespace

int main() {
    Rng rng(1);
    std::printf("%-28s %13s %13s %9s %12s\n", "kernel", "parallel", "serial", "speedup",
                "throughput");

    {
        const int64_t n = 192;
        std::vector<double> a(n * n), b(n * n), c(n * n);
        for (auto& v : a) v = rng.normal();
        for (auto& v : b) v = rng.normal();
        const double flops = 2.0 * n * n * n;
        const double par = time_ms([&] { kernels::matmul(a.data(), b.data(), c.data(), n, n, n); }, 5);
        const double ser = time_ms(
            [&] { kernels::reference::matmul(a.data(), b.data(), c.data(), n, n, n); }, 5);
        row("matmul 192x192x192", par, ser, flops);
    }
    {
        std::vector<double> x(48000), h(512);
        for (auto& v : x) v = rng.normal();
        for (auto& v : h) v = rng.normal();
        const double flops = 2.0 * x.size() * h.size();
        const double par = time_ms([&] { (void)kernels::convolve_direct(x, h); }, 3);
        const double ser = time_ms([&] { (void)kernels::reference::convolve(x, h); }, 3);
        row("convolve 48000x512 direct", par, ser, flops);
        const double fft = time_ms([&] { (void)kernels::convolve_fft(x, h); }, 3);
        std::printf("%-28s %10.3f ms (same result via FFT)\n", "convolve 48000x512 fft", fft);
    }
    {
        const int64_t channels = 12, hop = 1920, frames = 50, coeffs = 8;
        std::vector<double> audio(channels * hop * frames);
        for (auto& v : audio) v = rng.normal();
        std::vector<double> z(channels * coeffs * frames);
        const double flops = 2.0 * channels * frames * coeffs * hop;
        const double par = time_ms(
            [&] {
                kernels::dct_encode_frames(audio.data(), channels, hop * frames, hop, coeffs,
                                           z.data());
            },
            5);
        const double ser = time_ms(
            [&] {
                kernels::reference::dct_encode_frames(audio.data(), channels, hop * frames, hop,
                                                      coeffs, z.data());
            },
            5);
        row("dct encode 12ch 2s", par, ser, flops);
    }
    {
        const NetConfig cfg = NetConfig::desk();
        const VelocityField net = VelocityField::init(cfg, 7);
        LatentTensor z_t = LatentTensor::zeros(cfg.target_channels, cfg.latent_dim, 50);
        LatentTensor z_c = LatentTensor::zeros(cfg.cond_channels, cfg.latent_dim, 50);
        for (auto& v : z_t.data) v = rng.normal();
        for (auto& v : z_c.data) v = rng.normal();
        const double ms = time_ms([&] { (void)net.forward(z_t, 0.5, z_c); }, 3);
        std::printf("%-28s %10.3f ms (desk profile, 50 frames)\n", "velocity net forward", ms);
    }
    return 0;
}
