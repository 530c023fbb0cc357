#include "flow714/net/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "flow714/core/binio.hpp"
#include "flow714/core/crc32.hpp"
#include "flow714/core/errors.hpp"

namespace flow714 {

namespace {

constexpr char kMagic[4] = {'I', 'F', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void write_config(std::ostream& os, const NetConfig& cfg) {
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(cfg.num_blocks));
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(cfg.hidden_dim));
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(cfg.num_heads));
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(cfg.latent_dim));
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(cfg.target_channels));
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(cfg.cond_channels));
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(cfg.time_embed_dim));
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(cfg.max_frames));
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(cfg.ffn_mult));
    binio::write_le<uint32_t>(os, cfg.use_film ? 1u : 0u);
    binio::write_le<uint32_t>(os, cfg.use_cross_attention ? 1u : 0u);
}

NetConfig read_config(std::istream& is) {
    NetConfig cfg;
    cfg.num_blocks = binio::read_le<uint32_t>(is, "config");
    cfg.hidden_dim = binio::read_le<uint32_t>(is, "config");
    cfg.num_heads = binio::read_le<uint32_t>(is, "config");
    cfg.latent_dim = binio::read_le<uint32_t>(is, "config");
    cfg.target_channels = binio::read_le<uint32_t>(is, "config");
    cfg.cond_channels = binio::read_le<uint32_t>(is, "config");
    cfg.time_embed_dim = binio::read_le<uint32_t>(is, "config");
    cfg.max_frames = binio::read_le<uint32_t>(is, "config");
    cfg.ffn_mult = binio::read_le<uint32_t>(is, "config");
    cfg.use_film = binio::read_le<uint32_t>(is, "config") != 0;
    cfg.use_cross_attention = binio::read_le<uint32_t>(is, "config") != 0;
    return cfg;
}

void write_tensor(std::ostream& os, const std::string& name, const Tensor& t) {
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(name.size()));
    binio::write_bytes(os, name.data(), name.size());
    binio::write_le<uint32_t>(os, static_cast<uint32_t>(t.shape.size()));
    for (int64_t d : t.shape) binio::write_le<uint64_t>(os, static_cast<uint64_t>(d));
    for (double v : t.data) binio::write_le<double>(os, v);
}

std::pair<std::string, Tensor> read_tensor(std::istream& is) {
    const auto name_len = binio::read_le<uint32_t>(is, "tensor name");
    if (name_len == 0 || name_len > 4096) throw DataError("checkpoint: corrupt tensor block");
    std::string name(name_len, '\0');
    binio::read_bytes(is, name.data(), name_len, "tensor name");
    const auto rank = binio::read_le<uint32_t>(is, "tensor rank");
    if (rank > 8) throw DataError("checkpoint: corrupt tensor block (rank)");
    std::vector<int64_t> shape(rank);
    for (auto& d : shape) {
        d = static_cast<int64_t>(binio::read_le<uint64_t>(is, "tensor dims"));
    }
    Tensor t = Tensor::zeros(shape.empty() ? std::vector<int64_t>{} : shape);
    if (shape.empty()) t = Tensor::scalar(0.0);
    for (auto& v : t.data) v = binio::read_le<double>(is, "tensor data");
    return {std::move(name), std::move(t)};
}

}  // namespace

void save_checkpoint(const std::string& path, const VelocityField& net,
                     const AdamState& optimizer, int64_t step,
                     const std::map<std::string, Tensor>& extras) {
    std::ostringstream body(std::ios::binary);
    binio::write_magic(body, kMagic);
    binio::write_le<uint32_t>(body, kVersion);
    write_config(body, net.config);
    binio::write_le<uint64_t>(body, static_cast<uint64_t>(step));
    binio::write_le<uint64_t>(body, static_cast<uint64_t>(optimizer.t));

    uint32_t count = static_cast<uint32_t>(net.params.size() + optimizer.m.size() +
                                           optimizer.v.size() + extras.size());
    binio::write_le<uint32_t>(body, count);
    for (const auto& [name, t] : net.params) write_tensor(body, "param." + name, t);
    for (const auto& [name, t] : optimizer.m) write_tensor(body, "adam.m." + name, t);
    for (const auto& [name, t] : optimizer.v) write_tensor(body, "adam.v." + name, t);
    for (const auto& [name, t] : extras) write_tensor(body, name, t);

    const std::string bytes = body.str();
    const uint32_t crc = crc32_of(bytes.data(), bytes.size());

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("save_checkpoint: cannot open " + path);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    binio::write_le<uint32_t>(f, crc);
    if (!f) throw DataError("save_checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("load_checkpoint: cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (bytes.size() < 8 + 4) throw DataError("load_checkpoint: corrupt file (too short)");

    const size_t body_len = bytes.size() - 4;
    uint32_t stored_crc = 0;
    std::memcpy(&stored_crc, bytes.data() + body_len, 4);
    if (crc32_of(bytes.data(), body_len) != stored_crc) {
        throw DataError("load_checkpoint: corrupt tensor block (CRC mismatch): " + path);
    }

    std::istringstream is(bytes.substr(0, body_len), std::ios::binary);
    binio::expect_magic(is, kMagic, "checkpoint");
    const auto version = binio::read_le<uint32_t>(is, "version");
    if (version != kVersion) {
        throw DataError("load_checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint ckpt;
    ckpt.config = read_config(is);
    ckpt.config.validate();
    ckpt.step = static_cast<int64_t>(binio::read_le<uint64_t>(is, "step"));
    ckpt.optimizer.t = static_cast<int64_t>(binio::read_le<uint64_t>(is, "adam t"));
    const auto count = binio::read_le<uint32_t>(is, "tensor count");
    for (uint32_t i = 0; i < count; ++i) {
        auto [name, tensor] = read_tensor(is);
        if (name.rfind("param.", 0) == 0) {
            ckpt.params.emplace(name.substr(6), std::move(tensor));
        } else if (name.rfind("adam.m.", 0) == 0) {
            ckpt.optimizer.m.emplace(name.substr(7), std::move(tensor));
        } else if (name.rfind("adam.v.", 0) == 0) {
            ckpt.optimizer.v.emplace(name.substr(7), std::move(tensor));
        } else {
            ckpt.extras.emplace(std::move(name), std::move(tensor));
        }
    }
    return ckpt;
}

VelocityField net_from_checkpoint(const Checkpoint& ckpt, const NetConfig* expected) {
    if (expected != nullptr && !(*expected == ckpt.config)) {
        throw DataError("checkpoint: embedded config does not match the requested config");
    }
    VelocityField net;
    net.config = ckpt.config;
    for (const auto& [name, shape] : parameter_specs(ckpt.config)) {
        const auto it = ckpt.params.find(name);
        if (it == ckpt.params.end()) {
            throw DataError("checkpoint: missing parameter " + name);
        }
        if (it->second.shape != shape) {
            throw DataError("checkpoint: parameter " + name + " has wrong shape");
        }
        net.params.emplace(name, it->second);
    }
    return net;
}

}  // namespace flow714
