#pragma once

#include <cstdint>

#include "mlnum/core/train_record.hpp"
#include "mlnum/meanfield/dataset.hpp"
#include "mlnum/nn/two_layer.hpp"

namespace mlnum::meanfield {

struct RegularizedConfig {
    int steps = 2000;
    double eta = 0.05;
    std::uint64_t seed = 1;
    double w_lo = -1.0, w_hi = 1.0;  // particle init ranges
    double a_lo = -1.0, a_hi = 1.0;
    int log_every = 100;
};

struct RegularizedReport {
    double emp_risk = 0.0;
    double path_norm = 0.0;
    double test_risk = 0.0;
    TrainRecord record;  // qoi column = path norm
    bool diverged = false;
};

// Full-batch gradient descent on  R_hat(theta) + lambda sqrt(log(2d)/n) |theta|_P.
// lambda = 0 reproduces plain empirical-risk training exactly.
RegularizedReport regularized_train(nn::ScaledTwoLayerNet& net, const SupervisedDataset& train,
                                    double lambda, const RegularizedConfig& cfg,
                                    const SupervisedDataset& test);

}  // namespace mlnum::meanfield
