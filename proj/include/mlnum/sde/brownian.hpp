#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlnum/core/parallel.hpp"
#include "mlnum/sde/time_grid.hpp"

namespace mlnum::sde {

// Batch of Brownian increments, shape (B, N, d), each entry N(0, dt).
// Entry (b, n, k) is a pure function of (seed, stream, b, n, k), so
// regeneration and any parallel partitioning are bit-identical.
struct BrownianBatch {
    int B = 0, N = 0, d = 0;
    double dt = 0.0;
    std::uint64_t seed = 0, stream = 0;
    std::vector<double> dw;

    const double* at(int b, int n) const {
        return dw.data() + (static_cast<std::size_t>(b) * N + n) * d;
    }
};

BrownianBatch sample_brownian(const TimeGrid& grid, int d, int B, std::uint64_t seed,
                              std::uint64_t stream, Exec exec = Exec::Parallel);

}  // namespace mlnum::sde
