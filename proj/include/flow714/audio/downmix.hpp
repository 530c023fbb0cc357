#pragma once

#include <array>
#include <string>

#include "flow714/audio/audio.hpp"

namespace flow714 {

// Fixed, versioned 12 -> 2 fold-down. The default extends the AC-3 -3 dB
// center/surround convention uniformly: each stereo channel takes its own
// full-range channel at unity, plus C and the same-side surrounds/heights
// at 1/sqrt(2), LFE omitted, all scaled by 1/(1 + 4/sqrt(2)) against
// clipping.
struct DownmixMatrix {
    std::array<std::array<double, 12>, 2> coefficients{};
    std::string version;

    static DownmixMatrix ac3_default();

    // Side gain before the global scale (1/sqrt(2)).
    static double surround_gain();
    // The global anti-clipping scale.
    static double global_scale();
};

// stereo = matrix * channels, sample-wise. Input must be 7.1.4.
MultichannelAudio downmix(const MultichannelAudio& audio, const DownmixMatrix& matrix);

}  // namespace flow714
