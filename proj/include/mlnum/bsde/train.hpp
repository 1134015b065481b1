#pragma once

#include <cstdint>
#include <vector>

#include "mlnum/bsde/solver.hpp"
#include "mlnum/core/train_record.hpp"
#include "mlnum/nn/optimizer.hpp"

namespace mlnum::bsde {

struct LrPoint {
    long step = 0;
    double eta = 1e-2;
};

struct BsdeTrainConfig {
    int batch = 64;
    int iters = 500;
    nn::OptKind opt = nn::OptKind::Adam;
    double eta = 1e-2;
    std::vector<LrPoint> lr_schedule;  // piecewise-constant overrides, by step
    std::uint64_t seed = 1;
    Exec exec = Exec::Parallel;
};

// Stochastic optimization of the terminal-matching loss with a fresh Brownian
// batch every iteration; deterministic given the seed. On divergence the
// record collected so far is returned with `diverged` set.
TrainRecord train_bsde(BsdeSolver& solver, const PdeProblem& problem, const sde::TimeGrid& grid,
                       const BsdeTrainConfig& cfg);

}  // namespace mlnum::bsde
