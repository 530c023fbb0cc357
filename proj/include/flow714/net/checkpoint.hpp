#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "flow714/net/velocity_field.hpp"
#include "flow714/tensor/adam.hpp"

namespace flow714 {

// Checkpoint file (magic "IFCK"): version, config block (little-endian
// integer fields), step, then named float64 tensors, then a trailing CRC32
// of everything before it. Holds net parameters, Adam moments, and any
// extra tensors (e.g. latent standardization statistics).
struct Checkpoint {
    NetConfig config;
    int64_t step = 0;
    std::map<std::string, Tensor> params;
    AdamState optimizer;
    std::map<std::string, Tensor> extras;
};

void save_checkpoint(const std::string& path, const VelocityField& net,
                     const AdamState& optimizer, int64_t step,
                     const std::map<std::string, Tensor>& extras = {});

Checkpoint load_checkpoint(const std::string& path);

// Rebuilds a VelocityField from a loaded checkpoint; if expected is given,
// the embedded config must match it.
VelocityField net_from_checkpoint(const Checkpoint& ckpt, const NetConfig* expected = nullptr);

}  // namespace flow714
