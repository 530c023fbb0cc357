#include <fstream>

#include "flow714/codec/latent.hpp"
#include "flow714/core/binio.hpp"
#include "flow714/core/errors.hpp"

namespace flow714 {

namespace {
constexpr char kMagic[4] = {'I', 'F', 'L', 'T'};
constexpr uint32_t kVersion = 1;
}  // namespace

LatentTensor LatentTensor::zeros(int64_t channels, int64_t dim, int64_t frames,
                                 int64_t frame_rate) {
    if (channels <= 0 || dim <= 0 || frames <= 0) {
        throw DimensionError("latent: channels, dim, frames must be positive");
    }
    LatentTensor z;
    z.channels = channels;
    z.dim = dim;
    z.frames = frames;
    z.frame_rate = frame_rate;
    z.data.assign(static_cast<size_t>(channels * dim * frames), 0.0);
    return z;
}

std::string LatentTensor::shape_str() const {
    return "[" + std::to_string(channels) + "x" + std::to_string(dim) + "x" +
           std::to_string(frames) + "]";
}

void write_latent(const LatentTensor& z, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("write_latent: cannot open " + path);
    binio::write_magic(f, kMagic);
    binio::write_le<uint32_t>(f, kVersion);
    binio::write_le<uint32_t>(f, static_cast<uint32_t>(z.channels));
    binio::write_le<uint32_t>(f, static_cast<uint32_t>(z.dim));
    binio::write_le<uint32_t>(f, static_cast<uint32_t>(z.frames));
    binio::write_le<uint32_t>(f, static_cast<uint32_t>(z.frame_rate));
    for (double v : z.data) binio::write_le<float>(f, static_cast<float>(v));
}

LatentTensor read_latent(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("read_latent: cannot open " + path);
    binio::expect_magic(f, kMagic, "latent cache");
    const auto version = binio::read_le<uint32_t>(f, "version");
    if (version != kVersion) {
        throw DataError("read_latent: unsupported version " + std::to_string(version));
    }
    const auto channels = binio::read_le<uint32_t>(f, "channels");
    const auto dim = binio::read_le<uint32_t>(f, "dim");
    const auto frames = binio::read_le<uint32_t>(f, "frames");
    const auto frame_rate = binio::read_le<uint32_t>(f, "frame_rate");
    LatentTensor z = LatentTensor::zeros(channels, dim, frames, frame_rate);
    for (auto& v : z.data) v = static_cast<double>(binio::read_le<float>(f, "latent data"));
    return z;
}

}  // namespace flow714
