#pragma once

#include <cstdint>

#include "mlnum/core/train_record.hpp"
#include "mlnum/meanfield/dataset.hpp"
#include "mlnum/nn/optimizer.hpp"
#include "mlnum/pmp/forward_backward.hpp"

namespace mlnum::pmp {

struct MsaConfig {
    int outer_iters = 20;
    int inner_steps = 10;       // ascent steps per layer per start
    int inner_starts = 1;       // multi-start count (start 0 = current params)
    double inner_lr = 0.5;
    double lambda_msa = 1.0;    // extended-penalty weight; 0 recovers basic MSA
    double start_jitter = 0.1;  // perturbation scale of extra starts
    std::uint64_t seed = 1;
    double divergence_guard = 1e3;  // stop when loss exceeds guard * initial
};

struct MsaResult {
    TrainRecord record;     // qoi column = inner budget used that sweep
    long grad_evals = 0;    // per-sample full-net evaluation equivalents
    bool diverged = false;
};

// Extended Hamiltonian
//   H~(z, p, theta, v, q) = H - (lambda/2) |v - f(z, theta)|^2
//                             - (lambda/2) |q + grad_z H(z, p, theta)|^2,
// where f(z, theta) is the layer drift. Feasible slots (v = f(z, theta),
// q = -grad_z H) make both penalties vanish exactly.
double extended_hamiltonian(std::span<const double> z, std::span<const double> p,
                            std::span<const double> a, std::span<const double> w, int M, int D,
                            nn::Activation act, std::span<const double> v,
                            std::span<const double> q, double lambda);

// Successive-approximation training of the particle layers: per sweep, solve
// the state/costate pair with the current parameters, then maximize the
// (extended) Hamiltonian layer by layer with a fixed inner budget. All layers
// of one sweep use the same cached trajectories. alpha and the lift are
// treated as fixed.
MsaResult basic_msa(nn::ScaledResNet& net, const meanfield::SupervisedDataset& data,
                    const MsaConfig& cfg);
MsaResult extended_msa(nn::ScaledResNet& net, const meanfield::SupervisedDataset& data,
                       const MsaConfig& cfg);

struct ResnetSgdConfig {
    int iters = 1000;
    int batch = 32;
    double eta = 0.05;
    nn::OptKind kind = nn::OptKind::Sgd;
    std::uint64_t seed = 1;
};

// Minibatch baseline on the same model and parameter set (particles only).
MsaResult train_resnet_sgd(nn::ScaledResNet& net, const meanfield::SupervisedDataset& data,
                           const ResnetSgdConfig& cfg);

}  // namespace mlnum::pmp
