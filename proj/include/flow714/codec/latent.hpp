#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flow714 {

// [C x D x T'] latent block: C channels, D coefficients per frame, T' frames
// at frame_rate frames per second. Condition latents carry C=2, targets C=12.
struct LatentTensor {
    int64_t channels = 0;
    int64_t dim = 0;
    int64_t frames = 0;
    int64_t frame_rate = 25;
    std::vector<double> data;  // [channel][coeff][frame]

    static LatentTensor zeros(int64_t channels, int64_t dim, int64_t frames,
                              int64_t frame_rate = 25);

    int64_t numel() const { return channels * dim * frames; }
    double& at(int64_t c, int64_t d, int64_t t) {
        return data[static_cast<size_t>((c * dim + d) * frames + t)];
    }
    double at(int64_t c, int64_t d, int64_t t) const {
        return data[static_cast<size_t>((c * dim + d) * frames + t)];
    }
    bool same_shape(const LatentTensor& o) const {
        return channels == o.channels && dim == o.dim && frames == o.frames;
    }
    std::string shape_str() const;
};

// Binary latent cache (magic "IFLT"): header then row-major 32-bit
// little-endian floats.
void write_latent(const LatentTensor& z, const std::string& path);
LatentTensor read_latent(const std::string& path);

}  // namespace flow714
