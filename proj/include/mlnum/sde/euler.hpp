#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mlnum/core/parallel.hpp"
#include "mlnum/sde/brownian.hpp"
#include "mlnum/sde/time_grid.hpp"

namespace mlnum::sde {

// State dynamics dX = mu(t, X) dt + Sigma(t, X) dW. A null drift means zero;
// the diffusion is either scalar * identity (all benchmark problems) or a
// general matrix action dw -> Sigma(t, x) dw.
struct Dynamics {
    std::function<void(double t, std::span<const double> x, std::span<double> mu_out)> drift;
    bool sigma_is_scalar = true;
    double sigma_scalar = 1.0;
    std::function<void(double t, std::span<const double> x, std::span<const double> dw,
                       std::span<double> out)>
        sigma_apply;
};

struct StatePathBatch {
    int B = 0, N = 0, d = 0;
    std::vector<double> x;  // (B, N+1, d)

    const double* at(int b, int n) const {
        return x.data() + (static_cast<std::size_t>(b) * (N + 1) + n) * d;
    }
    double* at(int b, int n) {
        return x.data() + (static_cast<std::size_t>(b) * (N + 1) + n) * d;
    }
};

// Thrown when a simulated state leaves the finite range; carries the first
// offending (sample, step) in scan order.
struct NonFiniteState : std::runtime_error {
    NonFiniteState(int sample, int step, const std::string& what)
        : std::runtime_error(what), sample(sample), step(step) {}
    int sample, step;
};

StatePathBatch euler_maruyama(const Dynamics& dyn, const TimeGrid& grid,
                              std::span<const double> xi, const BrownianBatch& dw,
                              Exec exec = Exec::Parallel);

// One step of the controlled recursion x' = x + drift * dt + noise. Discrete
// recursions (b_t applied without time scaling) pass dt = 1.
void controlled_step(std::span<const double> x, std::span<const double> drift, double dt,
                     std::span<const double> noise, std::span<double> out);

// LQG drift 2 sqrt(lambda) m.
void lqg_drift(double lambda, std::span<const double> m, std::span<double> out);

}  // namespace mlnum::sde
