// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wiser/errors.hpp"
#include "wiser/tensor.hpp"

namespace wiser {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected adaptive-moment optimizer state for a fixed parameter
/// list. Moment buffers are allocated on first step.
class AdamState {
public:
    explicit AdamState(AdamConfig cfg = {}) : cfg_(cfg) {}

    const AdamConfig& config() const { return cfg_; }
    long step_count() const { return step_; }

    /// One in-place update. `params`, `grads` and `names` run parallel;
    /// names are used in diagnostics only.
    void step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
              const std::vector<std::string>& names) {
        if (params.size() != grads.size()) {
            throw ContractError("adam_step: " + std::to_string(params.size()) + " params vs " +
                                std::to_string(grads.size()) + " grads");
        }
        if (m_.empty()) {
            m_.reserve(params.size());
            v_.reserve(params.size());
            for (const Tensor* p : params) {
                m_.emplace_back(p->rows(), p->cols());
                v_.emplace_back(p->rows(), p->cols());
            }
        }
        ++step_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, double(step_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, double(step_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            Tensor& p = *params[i];
            const Tensor& g = grads[i];
            if (!p.same_shape(g) || !p.same_shape(m_[i])) {
                throw ShapeError("adam_step: parameter " + name_of(names, i) + " is " +
                                 p.shape_str() + ", gradient " + g.shape_str());
            }
            for (std::size_t j = 0; j < p.data.size(); ++j) {
                const double gj = g.data[j];
                if (std::isnan(gj)) {
                    throw NumericError("adam_step: NaN gradient in parameter " + name_of(names, i));
                }
                m_[i].data[j] = cfg_.beta1 * m_[i].data[j] + (1.0 - cfg_.beta1) * gj;
                v_[i].data[j] = cfg_.beta2 * v_[i].data[j] + (1.0 - cfg_.beta2) * gj * gj;
                const double mhat = m_[i].data[j] / bc1;
                const double vhat = v_[i].data[j] / bc2;
                p.data[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            }
        }
    }

private:
    static std::string name_of(const std::vector<std::string>& names, std::size_t i) {
        return i < names.size() ? names[i] : ("#" + std::to_string(i));
    }

    AdamConfig cfg_;
    std::vector<Tensor> m_, v_;
    long step_ = 0;
};

/// Free-function form of the update.
inline void adam_step(AdamState& state, const std::vector<Tensor*>& params,
                      const std::vector<Tensor>& grads, const std::vector<std::string>& names = {}) {
    state.step(params, grads, names);
}

} // namespace wiser
