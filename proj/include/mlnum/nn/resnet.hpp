#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlnum/nn/activation.hpp"
#include "mlnum/nn/grad_tape.hpp"
#include "mlnum/nn/param_store.hpp"

namespace mlnum::nn {

struct ResNetSpec {
    int d = 1;   // input dimension
    int L = 1;   // residual layers
    int M = 1;   // particles per layer
    int D = 0;   // lifted state dimension; 0 means d+1
    Activation act = Activation::Relu;
    bool train_alpha = true;
    bool train_lift = true;
};

// Scaled residual network:
//   z_0 = V x~,  x~ = (x, 1)
//   z_{l+1} = z_l + (1/(L M)) sum_j a_{j,l} sigma(w_{j,l} . z_l)
//   f(x) = alpha . z_L
class ScaledResNet {
public:
    explicit ScaledResNet(ResNetSpec spec);

    const ResNetSpec& spec() const { return spec_; }
    int lifted_dim() const { return D_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

    ParamStore::Slice slice_alpha() const { return params_.slice("alpha"); }
    ParamStore::Slice slice_lift() const { return params_.slice("V"); }
    ParamStore::Slice slice_a(int layer) const;
    ParamStore::Slice slice_w(int layer) const;

    // V = identity padding into dimension d+1 (requires D == d+1), alpha = 1.
    void set_identity_lift();
    void set_alpha_ones();
    void init_particles_uniform(std::uint64_t seed, std::uint64_t stream, double lo, double hi);

    double forward(std::span<const double> x) const;

    // Full state path z_0..z_L, flattened (L+1) x D.
    std::vector<double> forward_path(std::span<const double> x) const;

    // Forward pass with everything the reverse passes need.
    struct PathCache {
        std::vector<double> z;    // (L+1) x D
        std::vector<double> pre;  // L x M preactivations w_{j,l} . z_l
        double f = 0.0;
    };
    void forward_cache(std::span<const double> x, PathCache& cache) const;

    double risk(std::span<const double> X, std::span<const double> y, int n) const;
    void risk_grad(std::span<const double> X, std::span<const double> y, int n,
                   std::span<double> grad) const;
    GradTape risk_tape(std::span<const double> X, std::span<const double> y, int n) const;
    GradTape output_tape(std::span<const double> x) const;

private:
    // Adds the reverse pass of coeff * f(x) into grad.
    void accumulate_backward(std::span<const double> x, const PathCache& cache, double coeff,
                             std::span<double> grad) const;

    ResNetSpec spec_;
    int D_;
    ParamStore params_;
};

}  // namespace mlnum::nn
