#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "flow714/tensor/tensor.hpp"

namespace flow714 {

// Reverse-mode autodiff tape. Values are appended in evaluation order, so
// ids are already a topological order; backward() walks them in reverse and
// accumulates gradients into every requires_grad leaf. One tape per
// training item; tapes are single-threaded by contract.
class Tape {
public:
    using Id = int32_t;
    using GradMap = std::unordered_map<Id, Tensor>;

    // Registers an input. Gradient tracking follows value.requires_grad.
    Id leaf(Tensor value);

    const Tensor& value(Id id) const { return nodes_[static_cast<size_t>(id)].value; }
    size_t size() const { return nodes_.size(); }

    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id mul(Id a, Id b);             // elementwise
    Id scale(Id a, double s);
    Id matmul(Id a, Id b);          // [m,k] x [k,n]
    Id matmul_nt(Id a, Id b);       // [m,k] x [n,k]^T
    Id add_rowvec(Id x, Id v);      // x[m,n] + v per row, v has n elements
    Id mul_rowvec(Id x, Id v);
    Id slice_cols(Id x, int64_t start, int64_t count);
    Id slice_rows(Id x, int64_t start, int64_t count);
    Id concat_cols(const std::vector<Id>& parts);
    Id mean_rows(Id x);             // [m,n] -> [1,n]
    Id softmax(Id x);               // last axis, max-subtracted
    Id layer_norm(Id x, Id gain, Id bias, double eps);  // last axis
    Id gelu(Id x);                  // tanh approximation
    Id film(Id x, Id scale, Id shift);  // x*(1+scale)+shift per row
    Id mse_loss(Id pred, Id target);
    Id sum(Id x);
    Id reshape(Id x, std::vector<int64_t> shape);

    // Gradients of `loss` (scalar) for every requires_grad leaf; leaves the
    // loss does not reach get zero gradients of the leaf's shape.
    GradMap backward(Id loss);

private:
    struct Node {
        Tensor value;
        bool requires_grad = false;
        // Reads grads_[own id], accumulates into input grads.
        std::function<void(Tape&, const Tensor&)> backprop;
    };

    std::vector<Node> nodes_;
    std::vector<Id> leaves_;
    std::vector<Tensor> grads_;  // parallel to nodes_ during backward

    Id push(Tensor value, bool requires_grad, std::function<void(Tape&, const Tensor&)> backprop);
    bool needs_grad(Id id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }
    void accumulate(Id input, const Tensor& g);
    friend struct TapeOps;
};

}  // namespace flow714
