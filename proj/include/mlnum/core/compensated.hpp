#pragma once

#include <cmath>
#include <cstddef>

namespace mlnum {

// Neumaier compensated accumulator. Used wherever the particle-sum order is
// part of the reproducibility contract.
struct NeumaierSum {
    double s = 0.0;
    double c = 0.0;

    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }

    double value() const { return s + c; }
};

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace mlnum
