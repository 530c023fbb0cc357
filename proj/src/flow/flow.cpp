#include "flow714/flow/flow.hpp"

#include "flow714/core/errors.hpp"

namespace flow714 {

FlowBatch sample_path(const LatentTensor& z1, const LatentTensor& z_cond, Rng& rng,
                      std::optional<double> forced_t) {
    if (z1.frames != z_cond.frames) {
        throw DimensionError("sample_path: target " + z1.shape_str() + " and condition " +
                             z_cond.shape_str() + " disagree on frames");
    }
    FlowBatch b;
    b.t = forced_t ? *forced_t : rng.uniform();
    if (b.t < 0.0 || b.t > 1.0) throw DataError("sample_path: t outside [0, 1]");
    b.z1 = z1;
    b.z_cond = z_cond;
    b.z0 = LatentTensor::zeros(z1.channels, z1.dim, z1.frames, z1.frame_rate);
    for (auto& v : b.z0.data) v = rng.normal();
    b.z_t = b.z0;
    b.u = b.z0;
    for (size_t i = 0; i < b.z0.data.size(); ++i) {
        b.z_t.data[i] = (1.0 - b.t) * b.z0.data[i] + b.t * b.z1.data[i];
        b.u.data[i] = b.z1.data[i] - b.z0.data[i];
    }
    return b;
}

Tape::Id flow_loss_on_tape(Tape& tape, const VelocityField& net,
                           const std::map<std::string, Tape::Id>& param_ids,
                           const FlowBatch& batch) {
    const Tape::Id predicted = net.build_forward(tape, param_ids, batch.z_t, batch.t,
                                                 batch.z_cond);
    const Tape::Id target = tape.leaf(latent_to_tokens(batch.u));
    return tape.mse_loss(predicted, target);
}

double flow_loss(const VelocityField& net, const FlowBatch& batch) {
    Tape tape;
    const auto ids = net.register_params(tape, /*requires_grad=*/false);
    return tape.value(flow_loss_on_tape(tape, net, ids, batch)).data[0];
}

std::function<std::vector<double>(const std::vector<double>&, double)> velocity_ode_field(
    const VelocityField& net, const LatentTensor& z_cond) {
    const int64_t channels = net.config.target_channels;
    const int64_t dim = net.config.latent_dim;
    const int64_t frames = z_cond.frames;
    const int64_t rate = z_cond.frame_rate;
    LatentTensor cond = z_cond;
    return [&net, cond, channels, dim, frames, rate](const std::vector<double>& state,
                                                     double t) {
        LatentTensor z = LatentTensor::zeros(channels, dim, frames, rate);
        if (state.size() != z.data.size()) {
            throw DimensionError("velocity_ode_field: state size mismatch");
        }
        z.data = state;
        return net.forward(z, t, cond).data;
    };
}

}  // namespace flow714
