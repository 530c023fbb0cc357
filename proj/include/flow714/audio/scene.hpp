#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flow714/audio/audio.hpp"
#include "flow714/spatial/vbap.hpp"

namespace flow714 {

// One synthetic source: a sine or seeded white noise, routed either to a
// named layout channel or panned to a direction via VBAP over the non-LFE
// speakers.
struct SceneSource {
    enum class Wave { sine, noise };
    Wave wave = Wave::sine;
    double freq_hz = 440.0;  // sine only
    double amplitude = 0.5;
    std::optional<std::string> channel;
    std::optional<spatial::Direction> direction;
    double onset_s = 0.0;
    double duration_s = -1.0;  // -1 = to end of scene
    double lowpass_hz = 0.0;   // optional one-pole low-pass, 0 = off
};

// Plain-text scene: global `key = value` lines plus one `source ...` line
// per source with key=value tokens.
struct SceneSpec {
    double duration_s = 0.0;
    int64_t sample_rate = 48000;
    std::vector<SceneSource> sources;

    static SceneSpec parse(const std::string& text);
    static SceneSpec load(const std::string& path);
    std::string serialize() const;
};

// Deterministic 12-channel render of the scene for a given seed. Noise
// streams are derived per source index, so a scene renders bit-identically
// every time.
MultichannelAudio synth_scene(const SceneSpec& spec, uint64_t seed);

}  // namespace flow714
