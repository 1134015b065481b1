#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mlnum::meanfield {

using TargetFn = std::function<double(std::span<const double>)>;

// Supervised pairs (x_j, f*(x_j)) with x_j uniform on the unit cube.
struct SupervisedDataset {
    int d = 1;
    int n = 0;
    std::vector<double> X;  // n x d
    std::vector<double> y;
};

SupervisedDataset sample_dataset(const TargetFn& target, int n, int d, std::uint64_t seed,
                                 std::uint64_t stream);

}  // namespace mlnum::meanfield
