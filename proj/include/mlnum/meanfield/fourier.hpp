#pragma once

#include <cstdint>
#include <functional>

#include "mlnum/meanfield/dataset.hpp"
#include "mlnum/meanfield/mc.hpp"
#include "mlnum/nn/two_layer.hpp"

namespace mlnum::meanfield {

struct FourierApproxResult {
    nn::ScaledTwoLayerNet net;  // cosine features, a_j = amplitude(w_j)
    double l2_error_sq = 0.0;   // squared L2(mu) error against f_star
};

// Random-feature construction of f(x) = E_{w ~ pi}[a(w) cos(w . x)] by m
// i.i.d. frequencies; reports the squared L2 error against the closed-form
// target over `test_points` draws from mu.
FourierApproxResult fourier_feature_approx(
    const std::function<double(std::span<const double>)>& amplitude, int d, int m,
    std::uint64_t seed, std::uint64_t stream, const TargetFn& f_star, int test_points,
    McSampler frequency_dist = McSampler::Gaussian, McSampler test_dist = McSampler::Gaussian);

}  // namespace mlnum::meanfield
