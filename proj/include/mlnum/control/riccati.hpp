#pragma once

#include <vector>

#include "mlnum/control/problem.hpp"

namespace mlnum::control {

struct LqSolution {
    double optimal_cost = 0.0;
    // Feedback gains a_t = -K_t s_t, each control_dim x state_dim row-major.
    std::vector<std::vector<double>> K;
};

// Exact optimal expected cost of the LQ problem via the backward Riccati
// recursion, including the additive-noise trace terms. Throws on non-PSD
// cost matrices.
LqSolution riccati_lq_reference(const LqSpec& spec);

}  // namespace mlnum::control
