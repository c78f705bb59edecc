#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hfc/errors.hpp"

namespace hfc {

// Dense n-dimensional array. `T` is float for training, double for the
// verification mode used by oracles and gradient checks. The gradient buffer
// is allocated lazily; when present it always matches data.size().
template <typename T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
        data_.assign(checked_numel(shape_), T(0));
    }

    Tensor(std::vector<int> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (checked_numel(shape_) != static_cast<int64_t>(data_.size())) {
            throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                                 " does not match shape " + shape_string(shape_));
        }
    }

    static Tensor full(std::vector<int> shape, T value) {
        Tensor t(std::move(shape));
        std::fill(t.data_.begin(), t.data_.end(), value);
        return t;
    }

    const std::vector<int>& shape() const { return shape_; }
    int dim(size_t axis) const { return shape_.at(axis); }
    size_t rank() const { return shape_.size(); }
    int64_t size() const { return static_cast<int64_t>(data_.size()); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    bool has_grad() const { return !grad_.empty(); }

    // Allocates (zeroed) the gradient buffer if missing.
    std::vector<T>& grad() {
        if (grad_.empty()) grad_.assign(data_.size(), T(0));
        return grad_;
    }
    const std::vector<T>& grad_view() const { return grad_; }

    void zero_grad() { std::fill(grad_.begin(), grad_.end(), T(0)); }
    void drop_grad() { grad_.clear(); }

    // When false, backward passes skip this tensor (used for data batches,
    // which are leaves nobody optimizes).
    bool track_grad() const { return track_grad_; }
    void set_track_grad(bool v) { track_grad_ = v; }

    bool all_finite() const {
        for (const T v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    static std::string shape_string(const std::vector<int>& shape) {
        std::ostringstream os;
        os << "(";
        for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
        os << ")";
        return os.str();
    }

private:
    static int64_t checked_numel(const std::vector<int>& shape) {
        int64_t n = 1;
        for (const int e : shape) {
            if (e <= 0) throw DimensionError("tensor extent must be positive, got shape " + shape_string(shape));
            n *= e;
        }
        return n;
    }

    std::vector<int> shape_;
    std::vector<T> data_;
    std::vector<T> grad_;
    bool track_grad_ = true;
};

template <typename T>
using TensorPtr = std::shared_ptr<Tensor<T>>;

template <typename T>
TensorPtr<T> make_tensor(std::vector<int> shape) {
    return std::make_shared<Tensor<T>>(std::move(shape));
}

template <typename T>
TensorPtr<T> make_tensor(std::vector<int> shape, std::vector<T> data) {
    return std::make_shared<Tensor<T>>(std::move(shape), std::move(data));
}

// Reverse-mode tape: each operation appends one backward step during the
// forward pass; backward() replays them in reverse order. The closures own
// shared_ptrs to the tensors they touch, so activations stay alive until the
// tape is cleared.
template <typename T>
class Tape {
public:
    void record(std::function<void()> step) { steps_.push_back(std::move(step)); }

    // Caller seeds the output gradient (typically loss grad = 1) first.
    void backward() {
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
    }

    void clear() { steps_.clear(); }
    size_t size() const { return steps_.size(); }

private:
    std::vector<std::function<void()>> steps_;
};

} // namespace hfc
