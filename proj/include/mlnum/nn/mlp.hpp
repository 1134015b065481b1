#pragma once

#include <span>
#include <string>
#include <vector>

#include "mlnum/core/gaussian.hpp"
#include "mlnum/nn/activation.hpp"
#include "mlnum/nn/param_store.hpp"

namespace mlnum::nn {

struct MlpSpec {
    std::vector<int> widths;  // input, hidden..., output
    Activation act = Activation::Relu;
};

// Plain feedforward net with linear output layer, registered as named slices
// ("<prefix>/W0", "<prefix>/b0", ...) inside a shared ParamStore. Stateless
// apart from the slice offsets; batch workspaces live in caller-owned Caches
// so independent chunks can run concurrently.
class Mlp {
public:
    Mlp(const std::string& prefix, MlpSpec spec, ParamStore& store);

    int in_dim() const { return spec_.widths.front(); }
    int out_dim() const { return spec_.widths.back(); }
    int n_affine() const { return static_cast<int>(layers_.size()); }
    std::size_t param_count() const;

    struct Cache {
        std::vector<std::vector<double>> pre;     // per layer, B x out
        std::vector<std::vector<double>> hidden;  // per hidden layer, B x out (activated)
        int B = 0;
    };

    // X: B x in row-major. Y: B x out. cache may be null for inference.
    void forward(const ParamStore& store, std::span<const double> X, int B,
                 std::span<double> Y, Cache* cache) const;

    // dY: B x out upstream adjoints. Accumulates parameter adjoints into
    // grad (aligned with the store); writes input adjoints into dX if given.
    void backward(const ParamStore& store, std::span<const double> X, const Cache& cache,
                  std::span<const double> dY, int B, std::span<double> grad,
                  std::span<double> dX) const;

    // Uniform(-r, r) with r = scale * sqrt(6/(fan_in+fan_out)); biases zero.
    void init_glorot_uniform(ParamStore& store, RngStream& rng, double scale = 1.0) const;

private:
    struct Layer {
        std::size_t w_off, b_off;
        int in, out;
    };
    MlpSpec spec_;
    std::vector<Layer> layers_;
};

}  // namespace mlnum::nn
