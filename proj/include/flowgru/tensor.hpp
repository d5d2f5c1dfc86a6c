#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace flowgru {

// Dense row-major array with shape metadata; the engine's value type.
// Values are held as double, but trainable parameters are always kept at
// values exactly representable in single precision (see docs/model_format.md),
// so a save/load round trip is bit-exact.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (numel_of(shape) != data.size()) {
            throw std::invalid_argument("tensor shape does not match data length");
        }
    }

    static std::size_t numel_of(const std::vector<std::size_t>& s) {
        if (s.empty()) return 0;
        std::size_t n = 1;
        for (std::size_t e : s) n *= e;
        return n;
    }

    static Tensor zeros(std::vector<std::size_t> s) {
        const std::size_t n = numel_of(s);
        return Tensor(std::move(s), std::vector<double>(n, 0.0));
    }

    std::size_t numel() const { return data.size(); }
    bool empty() const { return data.empty(); }
    std::size_t ndim() const { return shape.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }
    std::size_t rows() const { return shape.at(0); }
    std::size_t cols() const { return shape.at(1); }

    double& operator[](std::size_t i) { return data[i]; }
    const double& operator[](std::size_t i) const { return data[i]; }

    // 2-D access, row-major.
    double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
    const double& at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool all_finite() const {
        for (double v : data) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

}  // namespace flowgru
