#pragma once

#include "flow714/audio/audio.hpp"
#include "flow714/spatial/hrir.hpp"

namespace flow714::spatial {

// VBAP over the measurement directions of an HRIR set: the three nearest
// directions by dot product, barycentric gains with negatives clamped, and
// energy normalization sum(g^2) = 1.
struct VbapGains {
    std::array<int, 3> triplet{-1, -1, -1};
    std::array<double, 3> gains{0.0, 0.0, 0.0};
    bool pairwise_fallback = false;
};

VbapGains vbap_gains(const Direction& target, const HrirSet& set);

// Full linear convolution; direct for short kernels, FFT past a size
// threshold. Both paths agree to ~1e-9.
std::vector<double> convolve(std::span<const double> signal, std::span<const double> ir);

// Binaural render: every non-LFE channel is convolved with its VBAP-blended
// HRIR pair at the channel's layout direction and summed into the two ears;
// the LFE channel is added diotically at -6 dB with no HRIR. Output length
// is input length + IR length - 1.
MultichannelAudio binauralize(const MultichannelAudio& audio, const HrirSet& set,
                              const ChannelLayout& layout);

}  // namespace flow714::spatial
