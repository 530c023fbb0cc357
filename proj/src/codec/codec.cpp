#include "flow714/codec/codec.hpp"

#include <cmath>

#include "flow714/core/errors.hpp"
#include "flow714/core/kernels.hpp"

namespace flow714 {

namespace {
constexpr double kStdFloor = 1e-6;
}

int64_t CodecConfig::hop() const {
    validate();
    return sample_rate / frame_rate;
}

void CodecConfig::validate() const {
    if (frame_rate <= 0 || sample_rate <= 0 || latent_dim <= 0) {
        throw DataError("codec: frame_rate, sample_rate, latent_dim must be positive");
    }
    if (sample_rate % frame_rate != 0) {
        throw DataError("codec: sample_rate " + std::to_string(sample_rate) +
                        " not divisible by frame_rate " + std::to_string(frame_rate));
    }
    if (latent_dim > sample_rate / frame_rate) {
        throw DataError("codec: latent_dim exceeds frame length");
    }
}

LatentTensor encode(const MultichannelAudio& audio, const CodecConfig& cfg) {
    const int64_t hop = cfg.hop();
    if (audio.sample_rate != cfg.sample_rate) {
        throw DataError("encode: audio rate " + std::to_string(audio.sample_rate) +
                        " != codec rate " + std::to_string(cfg.sample_rate));
    }
    if (audio.num_samples < hop) {
        throw DataError("encode: audio shorter than one frame (" + std::to_string(hop) +
                        " samples)");
    }
    const int64_t frames = audio.num_samples / hop;
    LatentTensor z =
        LatentTensor::zeros(audio.channel_count(), cfg.latent_dim, frames, cfg.frame_rate);
    // Trailing remainder beyond frames*hop is dropped; copy the covered span
    // so the kernel sees exact frame tiling.
    if (frames * hop == audio.num_samples) {
        kernels::dct_encode_frames(audio.samples.data(), z.channels, audio.num_samples, hop,
                                   cfg.latent_dim, z.data.data());
    } else {
        std::vector<double> trimmed(static_cast<size_t>(z.channels * frames * hop));
        for (int64_t c = 0; c < z.channels; ++c) {
            const double* src = audio.channel(c);
            double* dst = trimmed.data() + c * frames * hop;
            for (int64_t i = 0; i < frames * hop; ++i) dst[i] = src[i];
        }
        kernels::dct_encode_frames(trimmed.data(), z.channels, frames * hop, hop, cfg.latent_dim,
                                   z.data.data());
    }
    return z;
}

MultichannelAudio decode(const LatentTensor& z, const CodecConfig& cfg) {
    const int64_t hop = cfg.hop();
    if (z.dim != cfg.latent_dim) {
        throw DimensionError("decode: latent dim " + std::to_string(z.dim) +
                             " != codec latent_dim " + std::to_string(cfg.latent_dim));
    }
    if (z.frame_rate != cfg.frame_rate) {
        throw DimensionError("decode: latent frame_rate mismatch");
    }
    MultichannelAudio audio = MultichannelAudio::silence(
        ChannelLayout::generic(z.channels), cfg.sample_rate, z.frames * hop);
    kernels::dct_decode_frames(z.data.data(), z.channels, z.frames, hop, cfg.latent_dim,
                               audio.samples.data());
    return audio;
}

LatentStats latent_stats(const LatentTensor& z) {
    if (z.frames < 1) throw DataError("latent_stats: need at least one frame");
    LatentStats s{Tensor::zeros({z.channels, z.dim}), Tensor::zeros({z.channels, z.dim})};
    for (int64_t c = 0; c < z.channels; ++c) {
        for (int64_t d = 0; d < z.dim; ++d) {
            double mean = 0.0;
            for (int64_t t = 0; t < z.frames; ++t) mean += z.at(c, d, t);
            mean /= static_cast<double>(z.frames);
            double var = 0.0;
            for (int64_t t = 0; t < z.frames; ++t) {
                const double dev = z.at(c, d, t) - mean;
                var += dev * dev;
            }
            var /= static_cast<double>(z.frames);
            s.mean.at2(c, d) = mean;
            s.variance.at2(c, d) = var;
        }
    }
    return s;
}

LatentStats pooled_latent_stats(std::span<const LatentTensor> latents) {
    if (latents.empty()) throw DataError("pooled_latent_stats: empty set");
    const int64_t C = latents[0].channels, D = latents[0].dim;
    LatentStats s{Tensor::zeros({C, D}), Tensor::zeros({C, D})};
    int64_t total = 0;
    for (const LatentTensor& z : latents) {
        if (z.channels != C || z.dim != D) {
            throw DimensionError("pooled_latent_stats: mixed latent shapes");
        }
        total += z.frames;
    }
    for (const LatentTensor& z : latents) {
        for (int64_t c = 0; c < C; ++c)
            for (int64_t d = 0; d < D; ++d)
                for (int64_t t = 0; t < z.frames; ++t) s.mean.at2(c, d) += z.at(c, d, t);
    }
    for (auto& v : s.mean.data) v /= static_cast<double>(total);
    for (const LatentTensor& z : latents) {
        for (int64_t c = 0; c < C; ++c)
            for (int64_t d = 0; d < D; ++d)
                for (int64_t t = 0; t < z.frames; ++t) {
                    const double dev = z.at(c, d, t) - s.mean.at2(c, d);
                    s.variance.at2(c, d) += dev * dev;
                }
    }
    for (auto& v : s.variance.data) v /= static_cast<double>(total);
    return s;
}

LatentTensor standardize(const LatentTensor& z, const LatentStats& stats) {
    LatentTensor out = z;
    for (int64_t c = 0; c < z.channels; ++c)
        for (int64_t d = 0; d < z.dim; ++d) {
            const double mean = stats.mean.at2(c, d);
            const double sd = std::max(std::sqrt(stats.variance.at2(c, d)), kStdFloor);
            for (int64_t t = 0; t < z.frames; ++t) out.at(c, d, t) = (z.at(c, d, t) - mean) / sd;
        }
    return out;
}

LatentTensor destandardize(const LatentTensor& z, const LatentStats& stats) {
    LatentTensor out = z;
    for (int64_t c = 0; c < z.channels; ++c)
        for (int64_t d = 0; d < z.dim; ++d) {
            const double mean = stats.mean.at2(c, d);
            const double sd = std::max(std::sqrt(stats.variance.at2(c, d)), kStdFloor);
            for (int64_t t = 0; t < z.frames; ++t) out.at(c, d, t) = z.at(c, d, t) * sd + mean;
        }
    return out;
}

}  // namespace flow714
