#pragma once

#include <cstdint>
#include <span>

#include "mlnum/core/parallel.hpp"
#include "mlnum/meanfield/dataset.hpp"

namespace mlnum::meanfield {

enum class McSampler { UniformCube, Gaussian };

// (1/m) sum_j g(x_j) over i.i.d. draws keyed by (seed, stream, sample index).
double mc_integrate(const TargetFn& g, int d, long m, McSampler kind, std::uint64_t seed,
                    std::uint64_t stream, Exec exec = Exec::Serial);

// Mean of (I(g) - I_m(g))^2 over `reps` independent replications.
double replicated_mse(const TargetFn& g, double true_value, int d, long m, int reps,
                      McSampler kind, std::uint64_t seed, Exec exec = Exec::Parallel);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Least-squares line through (log x, log y).
SlopeFit fit_loglog(std::span<const double> xs, std::span<const double> ys);

}  // namespace mlnum::meanfield
