#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlnum/nn/param_store.hpp"

namespace mlnum::nn {

enum class OptKind { Sgd, Adam };

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First-order optimizer state. Single-owner: no concurrent steps on one
// ParamStore.
class OptimizerState {
public:
    static OptimizerState sgd(double eta) {
        OptimizerState s;
        s.kind_ = OptKind::Sgd;
        s.eta_ = eta;
        return s;
    }
    static OptimizerState adam(double eta, AdamHyper h = {}) {
        OptimizerState s;
        s.kind_ = OptKind::Adam;
        s.eta_ = eta;
        s.hyper_ = h;
        return s;
    }

    OptKind kind() const { return kind_; }
    double eta() const { return eta_; }
    void set_eta(double eta) { eta_ = eta; }
    long step_count() const { return step_; }

    // Applies one update in place. Returns false (and leaves params, moments
    // and the step counter untouched) if any gradient entry is non-finite.
    bool apply(ParamStore& params, std::span<const double> grad);

private:
    OptKind kind_ = OptKind::Sgd;
    double eta_ = 0.0;
    AdamHyper hyper_;
    long step_ = 0;
    std::vector<double> m_, v_;
};

}  // namespace mlnum::nn
