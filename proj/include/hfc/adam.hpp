#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hfc/errors.hpp"
#include "hfc/tensor.hpp"

namespace hfc {

// Per-parameter Adam state. Moments are lazily sized on the first step and
// must match the parameter thereafter.
template <typename T>
struct AdamState {
    int64_t step_count = 0;
    std::vector<T> first_moment;
    std::vector<T> second_moment;
    T beta1 = T(0.9);
    T beta2 = T(0.999);
    T epsilon = T(1e-8);
    T learning_rate = T(1e-3);
};

// One bias-corrected Adam update. Reads params.grad and leaves it untouched;
// the caller clears gradients between steps.
template <typename T>
void adam_step(Tensor<T>& params, AdamState<T>& state) {
    if (!params.has_grad()) throw StateError("adam_step: parameter has no gradient");
    const size_t n = static_cast<size_t>(params.size());
    if (state.first_moment.empty()) state.first_moment.assign(n, T(0));
    if (state.second_moment.empty()) state.second_moment.assign(n, T(0));
    if (state.first_moment.size() != n || state.second_moment.size() != n)
        throw DimensionError("adam_step: moment shape does not match parameter of size " +
                             std::to_string(n));

    state.step_count += 1;
    const T b1 = state.beta1, b2 = state.beta2;
    const T bc1 = T(1) - std::pow(b1, static_cast<T>(state.step_count));
    const T bc2 = T(1) - std::pow(b2, static_cast<T>(state.step_count));
    const T* g = params.grad().data();
    T* m = state.first_moment.data();
    T* v = state.second_moment.data();
    T* p = params.data();
    for (size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (T(1) - b1) * g[i];
        v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
        const T mhat = m[i] / bc1;
        const T vhat = v[i] / bc2;
        p[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
}

// Convenience wrapper stepping a whole parameter list with a shared
// learning rate.
template <typename T>
class AdamOptimizer {
public:
    AdamOptimizer(std::vector<TensorPtr<T>> params, T learning_rate, T beta1, T beta2, T epsilon)
        : params_(std::move(params)), states_(params_.size()) {
        for (auto& s : states_) {
            s.learning_rate = learning_rate;
            s.beta1 = beta1;
            s.beta2 = beta2;
            s.epsilon = epsilon;
        }
    }

    void set_learning_rate(T lr) {
        for (auto& s : states_) s.learning_rate = lr;
    }
    T learning_rate() const { return states_.empty() ? T(0) : states_.front().learning_rate; }

    void step() {
        for (size_t i = 0; i < params_.size(); ++i) adam_step(*params_[i], states_[i]);
    }

    void zero_grad() {
        for (auto& p : params_) p->zero_grad();
    }

private:
    std::vector<TensorPtr<T>> params_;
    std::vector<AdamState<T>> states_;
};

} // namespace hfc
