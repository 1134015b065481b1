#pragma once

#include <span>

#include "mlnum/control/policy_stack.hpp"
#include "mlnum/control/problem.hpp"
#include "mlnum/core/parallel.hpp"
#include "mlnum/nn/grad_tape.hpp"

namespace mlnum::control {

// Raw network outputs have this width for a given problem: the control
// dimension, or the null-space dimension under equality constraints.
int policy_out_dim(const ControlProblem& problem);

struct SimulateStats {
    double mean_cost = 0.0;
    bool finite = true;
    int bad_sample = -1;
    int bad_step = -1;
};

// Mean total cost over the noise batch (B, T, state_dim), with the exact
// pathwise gradient through dynamics and squashing when `grad` is non-empty.
SimulateStats simulate_cost_grad(const ControlProblem& problem, const PolicyStack& stack,
                                 std::span<const double> noise, int B, std::span<double> grad,
                                 Exec exec = Exec::Parallel);

double simulate_cost(const ControlProblem& problem, const PolicyStack& stack,
                     std::span<const double> noise, int B, Exec exec = Exec::Parallel);

// (mean cost, tape) surface over a noise batch.
nn::GradTape simulate_tape(const ControlProblem& problem, const PolicyStack& stack,
                           std::span<const double> noise, int B, Exec exec = Exec::Parallel);

}  // namespace mlnum::control
