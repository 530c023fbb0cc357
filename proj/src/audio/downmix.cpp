#include "flow714/audio/downmix.hpp"

#include <cmath>

#include "flow714/core/errors.hpp"

namespace flow714 {

double DownmixMatrix::surround_gain() { return std::sqrt(0.5); }

double DownmixMatrix::global_scale() { return 1.0 / (1.0 + 4.0 * std::sqrt(0.5)); }

DownmixMatrix DownmixMatrix::ac3_default() {
    // Channel order: L R C LFE Lss Rss Lrs Rrs Ltf Rtf Ltb Rtb.
    const double s = surround_gain() * global_scale();
    const double u = 1.0 * global_scale();
    DownmixMatrix m;
    m.version = "ac3-ext-v1";
    m.coefficients[0] = {u, 0, s, 0, s, 0, s, 0, s, 0, s, 0};
    m.coefficients[1] = {0, u, s, 0, 0, s, 0, s, 0, s, 0, s};
    return m;
}

MultichannelAudio downmix(const MultichannelAudio& audio, const DownmixMatrix& matrix) {
    if (!audio.layout.is_714()) {
        throw DataError("downmix: input must have the 12-channel 7.1.4 layout, got " +
                        std::to_string(audio.channel_count()) + " channels");
    }
    MultichannelAudio out =
        MultichannelAudio::silence(ChannelLayout::stereo(), audio.sample_rate, audio.num_samples);
    for (int e = 0; e < 2; ++e) {
        double* dst = out.channel(e);
        // Zero coefficients are skipped so the L/R mirror symmetry of the
        // default matrix holds bit-exactly (same value sequence per ear).
        for (int c = 0; c < 12; ++c) {
            const double g = matrix.coefficients[static_cast<size_t>(e)][static_cast<size_t>(c)];
            if (g == 0.0) continue;
            const double* src = audio.channel(c);
            for (int64_t i = 0; i < audio.num_samples; ++i) dst[i] += g * src[i];
        }
    }
    return out;
}

}  // namespace flow714
