#pragma once

#include <cstdint>
#include <vector>

#include "mlnum/core/parallel.hpp"
#include "mlnum/nn/optimizer.hpp"

namespace mlnum::meanfield {

// Test-error grid over (m, n) for the single-neuron target f*(x) = relu(x_1),
// trained with an identical budget in the scaled and unscaled
// parametrizations.
struct HeatmapConfig {
    std::vector<int> ms = {1, 4, 16, 64, 256};
    std::vector<int> ns = {8, 32, 128, 512};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    int d = 4;
    int steps = 1500;
    double eta = 1e-2;  // adam
    int test_points = 10000;
    double init_lo = -1.0, init_hi = 1.0;
};

struct HeatmapCell {
    int m = 0, n = 0;
    bool scaled = true;
    std::uint64_t seed = 0;
    double test_error = 0.0;  // population risk estimate on fresh points
    bool diverged = false;
};

// Runs every (m, n, seed) cell for one parametrization; cells are independent
// jobs. Divergence is recorded in the cell, not fatal.
std::vector<HeatmapCell> heatmap_experiment(const HeatmapConfig& cfg, bool scaled,
                                            Exec exec = Exec::Parallel);

}  // namespace mlnum::meanfield
