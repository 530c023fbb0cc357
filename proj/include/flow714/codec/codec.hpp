#pragma once

#include <span>

#include "flow714/audio/audio.hpp"
#include "flow714/codec/latent.hpp"
#include "flow714/tensor/tensor.hpp"

namespace flow714 {

// Deterministic per-channel waveform <-> latent codec: each non-overlapping
// frame of hop samples maps to its first D orthonormal DCT-II coefficients.
// Stands in for a learned codec behind the same latent geometry.
struct CodecConfig {
    int64_t frame_rate = 25;
    int64_t latent_dim = 8;
    int64_t sample_rate = 48000;

    int64_t hop() const;  // sample_rate / frame_rate, validated
    void validate() const;
};

// Per channel: frame, project onto the first D DCT basis vectors, concatenate
// channels along C. Requires at least one full frame of audio.
LatentTensor encode(const MultichannelAudio& audio, const CodecConfig& cfg);

// Inverse with coefficients D..hop-1 zeroed; output length frames * hop.
MultichannelAudio decode(const LatentTensor& z, const CodecConfig& cfg);

// Exact per-(channel, coefficient) sample statistics over the time axis
// (population variance, divisor T').
struct LatentStats {
    Tensor mean;      // [C, D]
    Tensor variance;  // [C, D]
};

LatentStats latent_stats(const LatentTensor& z);

// Pooled statistics over a set of equally-shaped latents.
LatentStats pooled_latent_stats(std::span<const LatentTensor> latents);

// (z - mean) / max(sqrt(variance), 1e-6) per (C, D) bin, and its inverse.
LatentTensor standardize(const LatentTensor& z, const LatentStats& stats);
LatentTensor destandardize(const LatentTensor& z, const LatentStats& stats);

}  // namespace flow714
