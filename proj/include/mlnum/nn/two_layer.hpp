#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlnum/nn/activation.hpp"
#include "mlnum/nn/grad_tape.hpp"
#include "mlnum/nn/param_store.hpp"

namespace mlnum::nn {

struct TwoLayerSpec {
    int d = 1;           // input dimension
    int m = 1;           // particle count
    Activation act = Activation::Relu;
    bool unscaled = false;  // drop the 1/m factor (conventional parametrization)
};

namespace detail {
// Canonical gradient terms for the mean squared risk of a two-layer net.
// Both the reverse-mode tape and the particle-flow velocity field are built
// from these exact expressions, which is what makes their trajectories
// bit-identical under the canonical summation order.
inline double tl_sample_coeff(double err, int n, int m, bool unscaled) {
    const double c = (2.0 * err) / static_cast<double>(n);
    return unscaled ? c : c / static_cast<double>(m);
}
inline double tl_grad_a_term(double coeff, Activation a, double s) {
    return coeff * act(a, s);
}
inline double tl_grad_w_term(double coeff, double a_j, Activation a, double s, double x_k) {
    return ((coeff * a_j) * act_deriv(a, s)) * x_k;
}
}  // namespace detail

// f(x) = (1/m) sum_j a_j sigma(w_j . x), or the plain sum when unscaled.
// Particle sums run left-to-right with Neumaier compensation.
class ScaledTwoLayerNet {
public:
    explicit ScaledTwoLayerNet(TwoLayerSpec spec);

    const TwoLayerSpec& spec() const { return spec_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

    std::span<double> a() { return params_.view("a"); }
    std::span<const double> a() const { return params_.view("a"); }
    std::span<double> w() { return params_.view("w"); }  // m x d row-major
    std::span<const double> w() const { return params_.view("w"); }

    // i.i.d. uniform particle initialization; draw order is fixed
    // (a_0..a_{m-1}, then w row-major), so snapshots reproduce.
    void init_uniform(std::uint64_t seed, std::uint64_t stream, double w_lo, double w_hi,
                      double a_lo, double a_hi);

    double forward(std::span<const double> x) const;

    // ((1/m) sum_k |a_k|^2 ||w_k||_1^2)^(1/2)
    double path_norm() const;

    // Mean squared empirical risk over a row-major batch X (n x d), targets y.
    double risk(std::span<const double> X, std::span<const double> y, int n) const;

    // Gradient of risk() w.r.t. the flat parameter vector, canonical order.
    void risk_grad(std::span<const double> X, std::span<const double> y, int n,
                   std::span<double> grad) const;

    GradTape risk_tape(std::span<const double> X, std::span<const double> y, int n) const;

    // Gradient of the raw output f(x) w.r.t. parameters.
    GradTape output_tape(std::span<const double> x) const;

private:
    TwoLayerSpec spec_;
    ParamStore params_;
};

}  // namespace mlnum::nn
