#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mlnum::nn {

// Result of one recorded forward pass. backward() yields the exact
// reverse-mode gradient of the recorded scalar, aligned with the model's
// ParamStore; a second backward without a new forward pass is rejected.
class GradTape {
public:
    GradTape(std::size_t n_params, double value)
        : value_(value), grad_(n_params, 0.0) {}

    double value() const { return value_; }

    // Deferred-backward models install the reverse pass here; fused kernels
    // fill grad_ eagerly via mutable_grad() and install nothing.
    void set_backward(std::function<void(std::vector<double>&)> fn) { fn_ = std::move(fn); }
    std::vector<double>& mutable_grad() { return grad_; }

    const std::vector<double>& backward() {
        if (consumed_)
            throw std::logic_error("GradTape::backward called twice without a new forward pass");
        consumed_ = true;
        if (fn_) fn_(grad_);
        return grad_;
    }

private:
    double value_;
    std::vector<double> grad_;
    std::function<void(std::vector<double>&)> fn_;
    bool consumed_ = false;
};

}  // namespace mlnum::nn
