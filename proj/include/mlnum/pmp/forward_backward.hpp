#pragma once

#include <span>
#include <vector>

#include "mlnum/nn/resnet.hpp"

namespace mlnum::pmp {

// Empirical-measure Hamiltonian H(z, p, {(a_j, w_j)}) = (1/M) sum_j p . (a_j sigma(w_j . z)).
// a and w are M x D row-major particle blocks.
double hamiltonian(std::span<const double> z, std::span<const double> p,
                   std::span<const double> a, std::span<const double> w, int M, int D,
                   nn::Activation act);

// grad_z H, same empirical-measure convention.
void hamiltonian_grad_z(std::span<const double> z, std::span<const double> p,
                        std::span<const double> a, std::span<const double> w, int M, int D,
                        nn::Activation act, std::span<double> out);

// Layer drift f(z, theta_l) = (1/M) sum_j a_j sigma(w_j . z) = grad_p H.
void layer_drift(std::span<const double> z, std::span<const double> a,
                 std::span<const double> w, int M, int D, nn::Activation act,
                 std::span<double> out);

// States and costates of one input under the scaled-ResNet flow. The costate
// recursion is the exact discrete adjoint of the forward recursion,
//   p_l = p_{l+1} + (1/(L M)) sum_j sigma'(w_j . z_l) (a_j . p_{l+1}) w_j,
// with terminal condition p_L = -2 (f(x) - f*(x)) alpha.
struct ForwardBackwardCache {
    std::vector<double> z;    // (L+1) x D
    std::vector<double> p;    // (L+1) x D
    std::vector<double> pre;  // L x M preactivations
    double f = 0.0;
};

void forward_backward(const nn::ScaledResNet& net, std::span<const double> x, double f_star,
                      ForwardBackwardCache& cache);

// Batch-mean per-particle gradient
//   G_{a_j,l} = (1/n) sum_x [ -(1/(L M)) sigma(w_j . z_l) p_{l+1} ],
//   G_{w_j,l} = (1/n) sum_x [ -(1/(L M)) sigma'(w_j . z_l) (a_j . p_{l+1}) z_l ],
// written into the layer slices of `grad` (aligned with net.params(); the
// alpha and lift slices stay zero). Equals the reverse-mode gradient of the
// batch risk: the descent direction is its negative.
void pmp_gradient(const nn::ScaledResNet& net, std::span<const double> X,
                  std::span<const double> y, int n, std::span<double> grad);

}  // namespace mlnum::pmp
