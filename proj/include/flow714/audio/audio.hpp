#pragma once

#include <cstdint>
#include <vector>

#include "flow714/audio/layout.hpp"

namespace flow714 {

// Sample-rate-stamped PCM buffer, one row per layout channel, values in
// [-1, 1] and finite.
struct MultichannelAudio {
    int64_t sample_rate = 48000;
    ChannelLayout layout;
    int64_t num_samples = 0;
    std::vector<double> samples;  // [channels][num_samples]

    static MultichannelAudio silence(ChannelLayout layout, int64_t sample_rate,
                                     int64_t num_samples);

    int64_t channel_count() const { return layout.channel_count(); }
    double* channel(int64_t c) { return samples.data() + c * num_samples; }
    const double* channel(int64_t c) const { return samples.data() + c * num_samples; }
    double& at(int64_t c, int64_t i) { return samples[static_cast<size_t>(c * num_samples + i)]; }
    double at(int64_t c, int64_t i) const {
        return samples[static_cast<size_t>(c * num_samples + i)];
    }
    double duration_seconds() const {
        return static_cast<double>(num_samples) / static_cast<double>(sample_rate);
    }
    double channel_rms(int64_t c) const;
};

// Consecutive non-overlapping clips of exactly clip_seconds; the trailing
// remainder is discarded.
std::vector<MultichannelAudio> segment(const MultichannelAudio& audio, double clip_seconds);

}  // namespace flow714
