// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "wiser/rng.hpp"
#include "wiser/tensor.hpp"

namespace testutil {

inline wiser::Tensor random_tensor(std::size_t rows, std::size_t cols, wiser::Rng& rng,
                                   double lo = -1.0, double hi = 1.0) {
    wiser::Tensor t(rows, cols);
    for (double& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

/// Scale-relative gradient discrepancy: ||a - b||_inf / (||b||_inf + tiny).
inline double rel_err(const wiser::Tensor& a, const wiser::Tensor& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        num = std::max(num, std::abs(a.data[i] - b.data[i]));
        den = std::max(den, std::abs(b.data[i]));
    }
    return num / (den + 1e-10);
}

inline bool bit_equal(const wiser::Tensor& a, const wiser::Tensor& b) {
    if (a.data.size() != b.data.size()) return false;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        if (a.data[i] != b.data[i]) return false;
    return true;
}

} // namespace testutil
