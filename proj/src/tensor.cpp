#include "ndrl/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ndrl/errors.hpp"

namespace ndrl {

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
    std::size_t n = 1;
    for (std::size_t dim : shape) n *= dim;
    if (n != data.size()) {
        throw DimensionError("tensor shape " + shape_str(*this) + " does not match data length " +
                             std::to_string(data.size()));
    }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    std::size_t n = 1;
    for (std::size_t dim : shape) n *= dim;
    Tensor t;
    t.shape = std::move(shape);
    t.data.assign(n, 0.0);
    return t;
}

Tensor Tensor::vec(std::vector<double> values) {
    Tensor t;
    t.shape = {values.size()};
    t.data = std::move(values);
    return t;
}

bool Tensor::all_finite() const {
    for (double x : data) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

std::string shape_str(const Tensor& t) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) os << ",";
        os << t.shape[i];
    }
    os << ")";
    return os.str();
}

void require_same_shape(const Tensor& a, const Tensor& b, const std::string& what) {
    if (!same_shape(a, b)) {
        throw DimensionError(what + ": expected shape " + shape_str(a) + ", got " + shape_str(b));
    }
}

}  // namespace ndrl
