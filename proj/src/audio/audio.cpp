#include "flow714/audio/audio.hpp"

#include <cmath>

#include "flow714/core/errors.hpp"

namespace flow714 {

MultichannelAudio MultichannelAudio::silence(ChannelLayout layout, int64_t sample_rate,
                                             int64_t num_samples) {
    if (sample_rate <= 0) throw DataError("audio: sample rate must be positive");
    MultichannelAudio a;
    a.sample_rate = sample_rate;
    a.layout = std::move(layout);
    a.num_samples = num_samples;
    a.samples.assign(static_cast<size_t>(a.layout.channel_count() * num_samples), 0.0);
    return a;
}

double MultichannelAudio::channel_rms(int64_t c) const {
    if (num_samples == 0) return 0.0;
    double acc = 0.0;
    const double* x = channel(c);
    for (int64_t i = 0; i < num_samples; ++i) acc += x[i] * x[i];
    return std::sqrt(acc / static_cast<double>(num_samples));
}

std::vector<MultichannelAudio> segment(const MultichannelAudio& audio, double clip_seconds) {
    if (clip_seconds <= 0.0) throw DataError("segment: clip length must be positive");
    const int64_t clip_samples =
        static_cast<int64_t>(std::llround(clip_seconds * static_cast<double>(audio.sample_rate)));
    if (clip_samples <= 0) throw DataError("segment: clip shorter than one sample");
    const int64_t clips = audio.num_samples / clip_samples;
    std::vector<MultichannelAudio> out;
    out.reserve(static_cast<size_t>(clips));
    for (int64_t k = 0; k < clips; ++k) {
        MultichannelAudio clip =
            MultichannelAudio::silence(audio.layout, audio.sample_rate, clip_samples);
        for (int64_t c = 0; c < audio.channel_count(); ++c) {
            const double* src = audio.channel(c) + k * clip_samples;
            double* dst = clip.channel(c);
            for (int64_t i = 0; i < clip_samples; ++i) dst[i] = src[i];
        }
        out.push_back(std::move(clip));
    }
    return out;
}

}  // namespace flow714
