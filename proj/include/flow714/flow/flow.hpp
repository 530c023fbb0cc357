#pragma once

#include <functional>
#include <optional>

#include "flow714/codec/latent.hpp"
#include "flow714/core/rng.hpp"
#include "flow714/net/velocity_field.hpp"

namespace flow714 {

// One sampled point on the linear probability path: z_t = (1-t) z0 + t z1
// with target velocity u = z1 - z0 (independent of t).
struct FlowBatch {
    double t = 0.0;
    LatentTensor z0;
    LatentTensor z1;
    LatentTensor z_cond;
    LatentTensor z_t;
    LatentTensor u;
};

// Draws t ~ Uniform[0,1] (unless forced) and z0 ~ N(0, I), then builds the
// interpolant and target velocity. Forcing t does not consume rng draws for
// t, so the z0 stream is identical across forced values.
FlowBatch sample_path(const LatentTensor& z1, const LatentTensor& z_cond, Rng& rng,
                      std::optional<double> forced_t = std::nullopt);

// Mean squared error between the predicted and target velocity.
double flow_loss(const VelocityField& net, const FlowBatch& batch);

// Same loss on a caller-owned tape (for gradients).
Tape::Id flow_loss_on_tape(Tape& tape, const VelocityField& net,
                           const std::map<std::string, Tape::Id>& param_ids,
                           const FlowBatch& batch);

// dz/dt = v(z, t, z_cond) as a flat-state field for the ODE solver.
std::function<std::vector<double>(const std::vector<double>&, double)> velocity_ode_field(
    const VelocityField& net, const LatentTensor& z_cond);

}  // namespace flow714
