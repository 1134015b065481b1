#pragma once

#include <cstdint>

#include "mlnum/bsde/train.hpp"
#include "mlnum/control/simulate.hpp"
#include "mlnum/core/train_record.hpp"
#include "mlnum/nn/optimizer.hpp"

namespace mlnum::control {

struct PolicyTrainConfig {
    int batch = 256;
    int iters = 1000;
    nn::OptKind opt = nn::OptKind::Adam;
    double eta = 1e-2;
    std::vector<bsde::LrPoint> lr_schedule;
    std::uint64_t seed = 1;
    Exec exec = Exec::Parallel;
};

// Stochastic optimization of the simulated total cost with fresh noise per
// iteration; deterministic given the seed. qoi column = batch mean cost.
TrainRecord train_policies(const ControlProblem& problem, PolicyStack& stack,
                           const PolicyTrainConfig& cfg);

// Mean cost over a large fresh evaluation batch.
double evaluate_policy(const ControlProblem& problem, const PolicyStack& stack, int B,
                       std::uint64_t seed, std::uint64_t stream, Exec exec = Exec::Parallel);

}  // namespace mlnum::control
