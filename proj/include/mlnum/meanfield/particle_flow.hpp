#pragma once

#include <cstdint>

#include "mlnum/meanfield/dataset.hpp"
#include "mlnum/nn/two_layer.hpp"

namespace mlnum::meanfield {

struct ParticleFlowResult {
    double max_param_deviation = 0.0;  // over all steps, both routes
    int steps_run = 0;
    double final_risk = 0.0;
};

// Runs, from one shared initialization, (i) the explicit-Euler particle
// discretization of the conserved parameter flow, with per-particle
// velocities assembled particle-major from the mean-field field, and (ii)
// plain gradient descent on the scaled two-layer net via the reverse-mode
// tape. The two updates are algebraically identical; with the canonical
// summation order they must match bitwise.
ParticleFlowResult particle_flow_equivalence(const SupervisedDataset& data, int m, int steps,
                                             double eta, nn::Activation act, std::uint64_t seed);

}  // namespace mlnum::meanfield
