#pragma once

#include <stdexcept>

namespace mlnum::sde {

// Uniform grid t_n = n T / N on [0, T].
struct TimeGrid {
    double T = 1.0;
    int N = 1;

    TimeGrid() = default;
    TimeGrid(double horizon, int steps) : T(horizon), N(steps) {
        if (!(T > 0.0) || N < 1) throw std::invalid_argument("TimeGrid requires T > 0 and N >= 1");
    }

    double dt() const { return T / static_cast<double>(N); }
    double t(int n) const { return static_cast<double>(n) * T / static_cast<double>(N); }
};

}  // namespace mlnum::sde
