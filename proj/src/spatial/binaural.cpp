#include "flow714/spatial/binaural.hpp"

#include <cmath>

#include "flow714/core/errors.hpp"
#include "flow714/core/kernels.hpp"

namespace flow714::spatial {

VbapGains vbap_gains(const Direction& target, const HrirSet& set) {
    set.validate();
    const PanGains pan = pan_gains(target, set.directions);
    VbapGains out;
    out.triplet = pan.indices;
    out.gains = pan.gains;
    out.pairwise_fallback = pan.pairwise_fallback;
    return out;
}

std::vector<double> convolve(std::span<const double> signal, std::span<const double> ir) {
    if (signal.empty() || ir.empty()) throw DataError("convolve: empty input");
    // Direct wins for short kernels; FFT past ~2^20 multiply-adds.
    if (static_cast<int64_t>(signal.size()) * static_cast<int64_t>(ir.size()) < (1 << 20)) {
        return kernels::convolve_direct(signal, ir);
    }
    return kernels::convolve_fft(signal, ir);
}

MultichannelAudio binauralize(const MultichannelAudio& audio, const HrirSet& set,
                              const ChannelLayout& layout) {
    set.validate();
    if (audio.sample_rate != set.sample_rate) {
        throw DataError("binauralize: audio rate " + std::to_string(audio.sample_rate) +
                        " != HRIR rate " + std::to_string(set.sample_rate));
    }
    if (audio.channel_count() != layout.channel_count()) {
        throw DataError("binauralize: audio has " + std::to_string(audio.channel_count()) +
                        " channels but layout has " + std::to_string(layout.channel_count()));
    }
    const int64_t ir_len = set.ir_length();
    const int64_t out_len = audio.num_samples + ir_len - 1;
    const int64_t channels = audio.channel_count();
    const double lfe_gain = std::pow(10.0, -6.0 / 20.0);

    // Per-channel ear contributions, summed in channel order afterwards so
    // the result does not depend on scheduling.
    std::vector<std::vector<double>> ear_l(static_cast<size_t>(channels));
    std::vector<std::vector<double>> ear_r(static_cast<size_t>(channels));
#pragma omp parallel for schedule(static)
    for (int64_t c = 0; c < channels; ++c) {
        const Channel& ch = layout.channel(c);
        const std::span<const double> x(audio.channel(c),
                                        static_cast<size_t>(audio.num_samples));
        if (ch.is_lfe) {
            std::vector<double> diotic(static_cast<size_t>(out_len), 0.0);
            for (int64_t i = 0; i < audio.num_samples; ++i) diotic[i] = lfe_gain * x[i];
            ear_l[static_cast<size_t>(c)] = diotic;
            ear_r[static_cast<size_t>(c)] = std::move(diotic);
            continue;
        }
        const VbapGains pan = vbap_gains({ch.azimuth_deg, ch.elevation_deg}, set);
        std::vector<double> ir_l(static_cast<size_t>(ir_len), 0.0);
        std::vector<double> ir_r(static_cast<size_t>(ir_len), 0.0);
        for (int g = 0; g < 3; ++g) {
            const int idx = pan.triplet[static_cast<size_t>(g)];
            if (idx < 0) continue;
            const double gain = pan.gains[static_cast<size_t>(g)];
            for (int64_t i = 0; i < ir_len; ++i) {
                ir_l[i] += gain * set.left[static_cast<size_t>(idx)][i];
                ir_r[i] += gain * set.right[static_cast<size_t>(idx)][i];
            }
        }
        ear_l[static_cast<size_t>(c)] = kernels::convolve_direct(x, ir_l);
        ear_r[static_cast<size_t>(c)] = kernels::convolve_direct(x, ir_r);
    }

    MultichannelAudio out =
        MultichannelAudio::silence(ChannelLayout::stereo(), audio.sample_rate, out_len);
    for (int64_t c = 0; c < channels; ++c) {
        const auto& l = ear_l[static_cast<size_t>(c)];
        const auto& r = ear_r[static_cast<size_t>(c)];
        for (size_t i = 0; i < l.size(); ++i) out.at(0, static_cast<int64_t>(i)) += l[i];
        for (size_t i = 0; i < r.size(); ++i) out.at(1, static_cast<int64_t>(i)) += r[i];
    }
    for (double v : out.samples) {
        if (!std::isfinite(v)) throw NumericalError("binauralize: non-finite output");
    }
    return out;
}

}  // namespace flow714::spatial
