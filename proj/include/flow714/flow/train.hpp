#pragma once

#include <functional>
#include <vector>

#include "flow714/flow/flow.hpp"
#include "flow714/tensor/adam.hpp"

namespace flow714 {

// One training pair: stereo condition latent and 7.1.4 target latent.
struct FlowPair {
    LatentTensor cond;
    LatentTensor target;
};

struct TrainConfig {
    int64_t steps = 1000;
    int64_t batch_size = 4;
    double lr = 1e-3;
    uint64_t seed = 0;
    int64_t log_every = 25;        // progress printing cadence (CLI)
    int64_t checkpoint_every = 0;  // 0 = no periodic checkpoints
    double ema_decay = 0.0;        // 0 = EMA off
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct TrainResult {
    // One (step, batch-mean loss) record per executed step.
    std::vector<std::pair<int64_t, double>> loss_history;
    std::map<std::string, Tensor> ema_params;  // empty when EMA is off
};

// Invoked after each checkpoint_every-th update (and never otherwise).
using TrainCallback =
    std::function<void(int64_t step, double loss, const VelocityField& net,
                       const AdamState& optimizer)>;

// Runs steps start_step+1 .. cfg.steps. Items are drawn with replacement;
// every random draw comes from a stream keyed by (seed, step, item), so the
// parameter trajectory is a pure function of (seed, dataset, config) and is
// unchanged by resume points or thread counts. Per-item passes may run in
// parallel; gradients are averaged in item order and the Adam update is
// serial. A non-finite loss aborts with the step index.
TrainResult train(const std::vector<FlowPair>& dataset, VelocityField& net,
                  AdamState& optimizer, const TrainConfig& cfg, int64_t start_step = 0,
                  const TrainCallback& on_checkpoint = nullptr);

// Appends `step<TAB>loss` lines.
void append_loss_history(const std::string& path,
                         const std::vector<std::pair<int64_t, double>>& history);

}  // namespace flow714
