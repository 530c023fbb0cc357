#include "flow714/audio/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "flow714/core/errors.hpp"

namespace flow714 {

namespace {

uint32_t rd_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<unsigned char>& out, uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
}

void wr_u16(std::vector<unsigned char>& out, uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

MultichannelAudio read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("read_wav: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw DataError("read_wav: malformed header (not RIFF/WAVE): " + path);
    }

    uint16_t format = 0, bits = 0;
    uint32_t sample_rate = 0;
    uint16_t channels = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    uint32_t data_size = 0;

    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        const uint32_t chunk_size = rd_u32(hdr + 4);
        const size_t body = pos + 8;
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_size < 16 || body + chunk_size > bytes.size()) {
                throw DataError("read_wav: malformed fmt chunk: " + path);
            }
            const unsigned char* p = bytes.data() + body;
            format = rd_u16(p);
            channels = rd_u16(p + 2);
            sample_rate = rd_u32(p + 4);
            bits = rd_u16(p + 14);
            if (format == kFormatExtensible) {
                if (chunk_size < 40) {
                    throw DataError("read_wav: malformed extensible fmt chunk: " + path);
                }
                // SubFormat GUID starts with the effective format code.
                format = rd_u16(p + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            if (body + chunk_size > bytes.size()) {
                throw DataError("read_wav: truncated data chunk: " + path);
            }
            data = bytes.data() + body;
            data_size = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt || data == nullptr) {
        throw DataError("read_wav: missing fmt or data chunk: " + path);
    }
    if (channels == 0 || sample_rate == 0) {
        throw DataError("read_wav: malformed fmt fields: " + path);
    }

    const bool pcm16 = format == kFormatPcm && bits == 16;
    const bool pcm24 = format == kFormatPcm && bits == 24;
    const bool f32 = format == kFormatFloat && bits == 32;
    if (!pcm16 && !pcm24 && !f32) {
        throw DataError("read_wav: unsupported codec (format " + std::to_string(format) +
                        ", " + std::to_string(bits) + " bits): " + path);
    }

    const uint32_t bytes_per_sample = bits / 8;
    const uint32_t frame_bytes = bytes_per_sample * channels;
    const int64_t frames = data_size / frame_bytes;

    MultichannelAudio audio = MultichannelAudio::silence(ChannelLayout::generic(channels),
                                                         sample_rate, frames);
    for (int64_t i = 0; i < frames; ++i) {
        for (uint16_t c = 0; c < channels; ++c) {
            const unsigned char* s = data + (i * channels + c) * bytes_per_sample;
            double v = 0.0;
            if (pcm16) {
                const int16_t raw = static_cast<int16_t>(rd_u16(s));
                v = static_cast<double>(raw) / 32768.0;
            } else if (pcm24) {
                int32_t raw = static_cast<int32_t>(s[0]) | (static_cast<int32_t>(s[1]) << 8) |
                              (static_cast<int32_t>(s[2]) << 16);
                if (raw & 0x800000) raw |= ~0xFFFFFF;  // sign extend
                v = static_cast<double>(raw) / 8388608.0;
            } else {
                float raw;
                std::memcpy(&raw, s, 4);
                v = static_cast<double>(raw);
            }
            if (!std::isfinite(v)) throw DataError("read_wav: non-finite sample in " + path);
            audio.at(c, i) = v;
        }
    }
    return audio;
}

size_t write_wav(const MultichannelAudio& audio, const std::string& path, WavBitDepth depth) {
    const int64_t channels = audio.channel_count();
    const int64_t frames = audio.num_samples;
    const uint16_t bits = depth == WavBitDepth::pcm16 ? 16
                          : depth == WavBitDepth::pcm24 ? 24
                                                        : 32;
    const uint16_t format = depth == WavBitDepth::float32 ? kFormatFloat : kFormatPcm;
    const uint32_t bytes_per_sample = bits / 8;
    const uint32_t block_align = static_cast<uint32_t>(channels) * bytes_per_sample;
    const uint32_t data_size = static_cast<uint32_t>(frames) * block_align;

    std::vector<unsigned char> out;
    out.reserve(44 + data_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    wr_u32(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    wr_u32(out, 16);
    wr_u16(out, format);
    wr_u16(out, static_cast<uint16_t>(channels));
    wr_u32(out, static_cast<uint32_t>(audio.sample_rate));
    wr_u32(out, static_cast<uint32_t>(audio.sample_rate) * block_align);
    wr_u16(out, static_cast<uint16_t>(block_align));
    wr_u16(out, bits);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    wr_u32(out, data_size);

    size_t clipped = 0;
    for (int64_t i = 0; i < frames; ++i) {
        for (int64_t c = 0; c < channels; ++c) {
            double v = audio.at(c, i);
            if (v > 1.0) {
                v = 1.0;
                ++clipped;
            } else if (v < -1.0) {
                v = -1.0;
                ++clipped;
            }
            if (depth == WavBitDepth::pcm16) {
                const auto raw = static_cast<int16_t>(std::lrint(v * 32767.0));
                wr_u16(out, static_cast<uint16_t>(raw));
            } else if (depth == WavBitDepth::pcm24) {
                const auto raw = static_cast<int32_t>(std::lrint(v * 8388607.0));
                out.push_back(static_cast<unsigned char>(raw & 0xFF));
                out.push_back(static_cast<unsigned char>((raw >> 8) & 0xFF));
                out.push_back(static_cast<unsigned char>((raw >> 16) & 0xFF));
            } else {
                const float raw = static_cast<float>(v);
                unsigned char buf[4];
                std::memcpy(buf, &raw, 4);
                out.insert(out.end(), buf, buf + 4);
            }
        }
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("write_wav: cannot open " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("write_wav: write failed: " + path);
    return clipped;
}

}  // namespace flow714
