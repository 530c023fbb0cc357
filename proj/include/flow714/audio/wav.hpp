#pragma once

#include <cstddef>
#include <string>

#include "flow714/audio/audio.hpp"

namespace flow714 {

enum class WavBitDepth { pcm16, pcm24, float32 };

// Reads a RIFF/WAVE file: integer PCM 16/24-bit or 32-bit float, plain or
// WAVE_FORMAT_EXTENSIBLE, any channel count. Samples are normalized to
// [-1, 1]. Channel counts 2 and 12 get the standard layouts.
MultichannelAudio read_wav(const std::string& path);

// Writes a canonical 44-byte-header little-endian WAV, frames interleaved
// in layout channel order. Out-of-range samples are hard-clipped; the
// number of clipped samples is returned.
size_t write_wav(const MultichannelAudio& audio, const std::string& path, WavBitDepth depth);

}  // namespace flow714
