#include "mlnum/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace mlnum::nn {

bool OptimizerState::apply(ParamStore& params, std::span<const double> grad) {
    const std::size_t n = params.size();
    if (grad.size() != n)
        throw std::invalid_argument("gradient length does not match ParamStore");
    for (double g : grad) {
        if (!std::isfinite(g)) return false;  // step refused
    }

    auto theta = params.data();
    if (kind_ == OptKind::Sgd) {
        ++step_;
        for (std::size_t i = 0; i < n; ++i) theta[i] -= eta_ * grad[i];
        return true;
    }

    if (m_.empty()) {
        m_.assign(n, 0.0);
        v_.assign(n, 0.0);
    } else if (m_.size() != n) {
        throw std::invalid_argument("optimizer moments sized for a different ParamStore");
    }

    ++step_;
    const double b1 = hyper_.beta1, b2 = hyper_.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        m_[i] = b1 * m_[i] + (1.0 - b1) * g;
        v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
        const double mhat = m_[i] / corr1;
        const double vhat = v_[i] / corr2;
        theta[i] -= eta_ * mhat / (std::sqrt(vhat) + hyper_.eps);
    }
    return true;
}

}  // namespace mlnum::nn
