// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "wiser/errors.hpp"

namespace wiser {

/// Dense row-major tensor of 64-bit floats. Rank 0 (scalar), 1 (row
/// vector) and 2 (matrix) are supported; higher ranks are rejected.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;
    bool requires_grad = false;

    Tensor() = default;

    Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
        : shape{rows, cols}, data(rows * cols, fill) {}

    Tensor(std::vector<std::size_t> shp, std::vector<double> values)
        : shape(std::move(shp)), data(std::move(values)) {
        if (shape.size() > 2) {
            throw ShapeError("tensor rank " + std::to_string(shape.size()) + " not supported");
        }
        if (numel_of(shape) != data.size()) {
            throw ShapeError("shape/data mismatch: " + shape_str() + " holds " +
                             std::to_string(data.size()) + " values");
        }
    }

    static Tensor scalar(double v) { return Tensor({std::size_t(1), std::size_t(1)}, {v}); }

    static Tensor row(std::vector<double> values) {
        const std::size_t n = values.size();
        return Tensor({std::size_t(1), n}, std::move(values));
    }

    static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor(rows, cols, 0.0); }
    static Tensor ones(std::size_t rows, std::size_t cols) { return Tensor(rows, cols, 1.0); }

    static std::size_t numel_of(const std::vector<std::size_t>& shp) {
        std::size_t n = 1;
        for (std::size_t d : shp) n *= d;
        return n;
    }

    std::size_t numel() const { return data.size(); }
    std::size_t rows() const { return shape.size() == 2 ? shape[0] : 1; }
    std::size_t cols() const {
        if (shape.empty()) return 1;
        return shape.back();
    }
    bool is_scalar() const { return numel() == 1; }

    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

    double item() const {
        if (!is_scalar()) throw ShapeError("item() on non-scalar tensor " + shape_str());
        return data[0];
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool same_shape(const Tensor& other) const {
        return rows() == other.rows() && cols() == other.cols();
    }

    std::string shape_str() const {
        return std::to_string(rows()) + "x" + std::to_string(cols());
    }
};

/// Plain (untracked) matrix product.
inline Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: shapes " + a.shape_str() + " vs " + b.shape_str());
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const double* pa = a.data.data() + i * k;
        double* po = out.data.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = pa[p];
            if (av == 0.0) continue;
            const double* pb = b.data.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) po[j] += av * pb[j];
        }
    }
    return out;
}

} // namespace wiser
