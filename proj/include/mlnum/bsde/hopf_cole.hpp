#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "mlnum/core/parallel.hpp"

namespace mlnum::bsde {

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

// u(0, x0) = -(1/lambda) log E[ exp(-lambda g(x0 + sqrt(2) W_T)) ], with a
// delta-method standard error. The expectation is stabilized by a per-run
// max shift (log-sum-exp); `max_shift = false` evaluates the raw form, which
// is only safe for moderate lambda * g.
McEstimate hopf_cole_reference(int d, double lambda,
                               const std::function<double(std::span<const double>)>& g,
                               double T, long mc_samples, std::uint64_t seed,
                               std::uint64_t stream, std::span<const double> x0,
                               bool max_shift = true, Exec exec = Exec::Parallel);

// E[g(x0 + sigma W_T)] with standard error; the h = 0 oracle.
McEstimate mc_terminal_expectation(int d, const std::function<double(std::span<const double>)>& g,
                                   double T, double sigma_scalar, long mc_samples,
                                   std::uint64_t seed, std::uint64_t stream,
                                   std::span<const double> x0, Exec exec = Exec::Parallel);

}  // namespace mlnum::bsde
