#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ndrl {

// Dense row-major tensor of 64-bit floats. Everything downstream (states,
// actions, network parameters, checkpoints) is built on this.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d);

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor vec(std::vector<double> values);  // rank-1

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    bool all_finite() const;
};

bool same_shape(const Tensor& a, const Tensor& b);
std::string shape_str(const Tensor& t);

// Throws DimensionError when shapes differ; `what` names the operation.
void require_same_shape(const Tensor& a, const Tensor& b, const std::string& what);

}  // namespace ndrl
