#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mlnum/core/gaussian.hpp"
#include "mlnum/meanfield/dataset.hpp"
#include "mlnum/meanfield/mc.hpp"
#include "mlnum/nn/two_layer.hpp"

namespace mlnum::meanfield {

// Expectation-representation target f*(x) = E_{(a,w) ~ rho}[a sigma(w . x)],
// given by an atom sampler plus the closed-form f*.
struct BarronTarget {
    std::string name;
    int d = 1;
    nn::Activation act = nn::Activation::Relu;
    std::function<void(RngStream&, double& a, std::span<double> w)> sample_atom;
    TargetFn f_star;
};

// Finite mixture of K random relu atoms (closed form by direct summation).
BarronTarget barron_relu_atoms(int d, int K, std::uint64_t seed);
// a = 1, w ~ N(0, I): f*(x) = |x| / sqrt(2 pi).
BarronTarget barron_relu_gaussian(int d);
// a = 1, w ~ N(0, I), sigma = cos: f*(x) = exp(-|x|^2 / 2).
BarronTarget barron_cos_gaussian(int d);
// rho = point mass: f* realized exactly by one particle.
BarronTarget barron_point_mass(int d);

// Monte Carlo construction f_m from m i.i.d. atoms of rho.
nn::ScaledTwoLayerNet sample_barron_network(const BarronTarget& target, int m,
                                            std::uint64_t seed, std::uint64_t stream);

// L2(mu) error of f_m against f*, mu uniform on the cube, by MC on a fixed
// test set.
double l2_error(const nn::ScaledTwoLayerNet& net, const TargetFn& f_star,
                std::span<const double> test_X, int test_n);

struct RateStudyResult {
    std::vector<int> ms;
    std::vector<double> mean_err;
    std::vector<double> std_err;
    double slope = 0.0;
};

// For each rung: build f_m by sampling rho, measure the L2(mu) error, average
// over trials; returns the fitted log-log slope of mean error against m.
RateStudyResult barron_rate_study(const BarronTarget& target, std::span<const int> m_ladder,
                                  int trials, int test_points, std::uint64_t seed,
                                  Exec exec = Exec::Parallel);

}  // namespace mlnum::meanfield
