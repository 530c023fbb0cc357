#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "flow714/tensor/tensor.hpp"

namespace flow714 {

// Adam first/second moment estimates, keyed by parameter name. std::map
// keeps iteration order deterministic for checkpointing.
struct AdamState {
    std::map<std::string, Tensor> m;
    std::map<std::string, Tensor> v;
    int64_t t = 0;
};

// One bias-corrected Adam update over all named parameters. Missing moment
// tensors are zero-initialized on first use. Deterministic given inputs.
void adam_step(std::map<std::string, Tensor>& params,
               const std::map<std::string, Tensor>& grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

}  // namespace flow714
