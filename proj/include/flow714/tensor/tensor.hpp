#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flow714 {

// Dense row-major tensor of 64-bit floats. Rank 0 with one element is a
// scalar. Every operation that produces a Tensor validates finiteness;
// NaN/Inf is surfaced as NumericalError, never passed along silently.
struct Tensor {
    std::vector<int64_t> shape;
    std::vector<double> data;
    bool requires_grad = false;

    Tensor() = default;
    Tensor(std::vector<int64_t> shape_in, std::vector<double> data_in);

    static Tensor zeros(std::vector<int64_t> shape);
    static Tensor full(std::vector<int64_t> shape, double value);
    static Tensor scalar(double value);
    static Tensor row(std::vector<double> values);  // rank-1 [n]
    static Tensor matrix(int64_t rows, int64_t cols, std::vector<double> values);

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    size_t rank() const { return shape.size(); }
    bool is_scalar() const { return data.size() == 1 && shape.empty(); }
    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    // Rank-2 accessors.
    int64_t rows() const;
    int64_t cols() const;
    double& at2(int64_t r, int64_t c) { return data[static_cast<size_t>(r * cols() + c)]; }
    double at2(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * cols() + c)]; }

    std::string shape_str() const;
};

int64_t shape_numel(const std::vector<int64_t>& shape);

// Throws NumericalError naming `op` if any element is NaN/Inf.
void check_finite(const Tensor& t, const char* op);

}  // namespace flow714
