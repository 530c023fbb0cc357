#include "flow714/tensor/tensor.hpp"

#include <cmath>
#include <sstream>

#include "flow714/core/errors.hpp"

namespace flow714 {

int64_t shape_numel(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
        if (d <= 0) throw DimensionError("tensor: shape entries must be positive");
        n *= d;
    }
    return n;
}

Tensor::Tensor(std::vector<int64_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
    if (shape_numel(shape) != static_cast<int64_t>(data.size())) {
        throw DimensionError("tensor: data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str());
    }
}

Tensor Tensor::zeros(std::vector<int64_t> shape) {
    const int64_t n = shape_numel(shape);
    Tensor t;
    t.shape = std::move(shape);
    t.data.assign(static_cast<size_t>(n), 0.0);
    return t;
}

Tensor Tensor::full(std::vector<int64_t> shape, double value) {
    Tensor t = zeros(std::move(shape));
    for (auto& x : t.data) x = value;
    return t;
}

Tensor Tensor::scalar(double value) {
    Tensor t;
    t.data.assign(1, value);
    return t;
}

Tensor Tensor::row(std::vector<double> values) {
    Tensor t;
    t.shape = {static_cast<int64_t>(values.size())};
    t.data = std::move(values);
    return t;
}

Tensor Tensor::matrix(int64_t rows, int64_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

int64_t Tensor::rows() const {
    if (shape.size() != 2) throw DimensionError("tensor: rows() needs rank 2, got " + shape_str());
    return shape[0];
}

int64_t Tensor::cols() const {
    if (shape.size() != 2) throw DimensionError("tensor: cols() needs rank 2, got " + shape_str());
    return shape[1];
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

void check_finite(const Tensor& t, const char* op) {
    for (double x : t.data) {
        if (!std::isfinite(x)) {
            throw NumericalError(std::string(op) + ": non-finite value produced");
        }
    }
}

}  // namespace flow714
