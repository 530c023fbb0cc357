#pragma once

#include <map>
#include <string>

#include "flow714/codec/latent.hpp"
#include "flow714/net/config.hpp"
#include "flow714/tensor/tape.hpp"

namespace flow714 {

// Velocity field v(z_t, t, z_cond): time frames are tokens with the
// channel x coefficient grid flattened into the feature axis. Each block is
// pre-norm FiLM -> self-attention -> cross-attention over the projected
// stereo condition -> feedforward; FiLM parameters come from the time
// embedding plus the mean-pooled condition. The final projection starts at
// zero so a fresh net is the identity flow.
class VelocityField {
public:
    NetConfig config;
    std::map<std::string, Tensor> params;

    // Deterministic initialization: weights scaled-normal (std 0.02), biases
    // zero, layer-norm gains one, output projection zero.
    static VelocityField init(const NetConfig& cfg, uint64_t seed);

    // Inference forward; no gradients retained.
    LatentTensor forward(const LatentTensor& z_t, double t, const LatentTensor& z_cond) const;

    // Training forward on a caller-owned tape. param_ids maps parameter
    // names to tape leaves (see register_params).
    Tape::Id build_forward(Tape& tape, const std::map<std::string, Tape::Id>& param_ids,
                           const LatentTensor& z_t, double t, const LatentTensor& z_cond) const;

    std::map<std::string, Tape::Id> register_params(Tape& tape, bool requires_grad) const;
};

// Sinusoidal features of t in [0, 1]: dim/2 sine then dim/2 cosine values at
// 10000-base geometrically spaced frequencies. This is the pre-MLP part of
// the time embedding. Throws if t is outside [0, 1].
Tensor time_embed_features(double t, int64_t dim);

// [C, D, T'] <-> [T', C*D] token conversion.
Tensor latent_to_tokens(const LatentTensor& z);
LatentTensor tokens_to_latent(const Tensor& tokens, int64_t channels, int64_t dim,
                              int64_t frame_rate);

}  // namespace flow714
