#include "flow714/metrics/embed.hpp"

#include <cmath>

#include "flow714/core/errors.hpp"
#include "flow714/core/fft.hpp"

namespace flow714::metrics {

namespace {

constexpr int64_t kFrame = 1024;
constexpr int64_t kHop = 512;
constexpr double kPowerFloor = 1e-8;  // == -80 dB
constexpr double kPi = 3.14159265358979323846;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double to_db(double power) { return 10.0 * std::log10(std::max(power, kPowerFloor)); }

}  // namespace

std::vector<double> DspEmbedding::embed(std::span<const double> samples,
                                        int64_t sample_rate) const {
    if (samples.empty()) throw DataError("embed: empty input");
    if (sample_rate <= 0) throw DataError("embed: sample rate must be positive");

    // Hann window, precomputed once per call.
    std::vector<double> window(kFrame);
    for (int64_t i = 0; i < kFrame; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                         static_cast<double>(kFrame));
    }

    const int64_t n = static_cast<int64_t>(samples.size());
    const int64_t num_frames = n <= kFrame ? 1 : 1 + (n - kFrame) / kHop;
    const int64_t num_bins = kFrame / 2 + 1;
    const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(kFrame);

    // Triangular mel filterbank edges over [0, Nyquist].
    const double mel_max = hz_to_mel(static_cast<double>(sample_rate) / 2.0);
    std::vector<double> edges(kMelBands + 2);
    for (int64_t b = 0; b < kMelBands + 2; ++b) {
        edges[b] = mel_to_hz(mel_max * static_cast<double>(b) /
                             static_cast<double>(kMelBands + 1));
    }

    std::vector<double> band_power(kMelBands, 0.0);
    double centroid_sum = 0.0, rolloff_sum = 0.0, flatness_sum = 0.0;
    std::vector<double> frame_db;
    frame_db.reserve(static_cast<size_t>(num_frames));

    std::vector<double> frame(kFrame);
    for (int64_t f = 0; f < num_frames; ++f) {
        const int64_t start = f * kHop;
        double energy = 0.0;
        for (int64_t i = 0; i < kFrame; ++i) {
            const int64_t src = start + i;
            const double x = src < n ? samples[static_cast<size_t>(src)] : 0.0;
            energy += x * x;
            frame[static_cast<size_t>(i)] = x * window[static_cast<size_t>(i)];
        }
        frame_db.push_back(to_db(energy / static_cast<double>(kFrame)));

        const std::vector<double> power = power_spectrum(frame);

        double total = 0.0, weighted = 0.0, log_acc = 0.0;
        for (int64_t k = 0; k < num_bins; ++k) {
            total += power[static_cast<size_t>(k)];
            weighted += static_cast<double>(k) * bin_hz * power[static_cast<size_t>(k)];
            log_acc += std::log(power[static_cast<size_t>(k)] + 1e-30);
        }
        if (total > 0.0) {
            centroid_sum += weighted / total;
            double cum = 0.0;
            for (int64_t k = 0; k < num_bins; ++k) {
                cum += power[static_cast<size_t>(k)];
                if (cum >= 0.85 * total) {
                    rolloff_sum += static_cast<double>(k) * bin_hz;
                    break;
                }
            }
            flatness_sum += std::exp(log_acc / static_cast<double>(num_bins)) /
                            (total / static_cast<double>(num_bins));
        }

        for (int64_t b = 0; b < kMelBands; ++b) {
            const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
            double acc = 0.0;
            for (int64_t k = 0; k < num_bins; ++k) {
                const double hz = static_cast<double>(k) * bin_hz;
                double w = 0.0;
                if (hz > lo && hz < mid) {
                    w = (hz - lo) / (mid - lo);
                } else if (hz >= mid && hz < hi) {
                    w = (hi - hz) / (hi - mid);
                }
                acc += w * power[static_cast<size_t>(k)];
            }
            band_power[static_cast<size_t>(b)] += acc;
        }
    }

    const double inv_frames = 1.0 / static_cast<double>(num_frames);
    std::vector<double> out;
    out.reserve(static_cast<size_t>(dim()));
    for (int64_t b = 0; b < kMelBands; ++b) {
        out.push_back(to_db(band_power[static_cast<size_t>(b)] * inv_frames));
    }
    out.push_back(centroid_sum * inv_frames);
    out.push_back(rolloff_sum * inv_frames);
    out.push_back(flatness_sum * inv_frames);
    double e_mean = 0.0;
    for (double db : frame_db) e_mean += db;
    e_mean *= inv_frames;
    double e_var = 0.0;
    for (double db : frame_db) e_var += (db - e_mean) * (db - e_mean);
    e_var *= inv_frames;
    out.push_back(e_mean);
    out.push_back(e_var);
    return out;
}

}  // namespace flow714::metrics
