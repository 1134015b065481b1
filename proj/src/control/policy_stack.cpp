#include "mlnum/control/policy_stack.hpp"

#include <stdexcept>
#include <string>

#include "mlnum/core/gaussian.hpp"

namespace mlnum::control {

PolicyStack::PolicyStack(int horizon, int state_dim, int out_dim, PolicySpec spec)
    : horizon_(horizon), state_dim_(state_dim), out_dim_(out_dim), spec_(std::move(spec)) {
    if (horizon_ < 1 || state_dim_ < 1 || out_dim_ < 1)
        throw std::invalid_argument("policy stack: positive dimensions required");
    std::vector<int> widths;
    widths.push_back(state_dim_);
    widths.insert(widths.end(), spec_.hidden.begin(), spec_.hidden.end());
    widths.push_back(out_dim_);
    const int count = spec_.share_weights ? 1 : horizon_;
    nets_.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t)
        nets_.emplace_back("t" + std::to_string(t), nn::MlpSpec{widths, spec_.act}, store_);
}

void PolicyStack::init(std::uint64_t seed, std::uint64_t stream) {
    RngStream rng(seed, stream);
    for (const auto& net : nets_) net.init_glorot_uniform(store_, rng, spec_.init_scale);
}

}  // namespace mlnum::control
