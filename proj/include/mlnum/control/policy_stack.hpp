#pragma once

#include <cstdint>
#include <vector>

#include "mlnum/nn/mlp.hpp"
#include "mlnum/nn/param_store.hpp"

namespace mlnum::control {

struct PolicySpec {
    std::vector<int> hidden = {24};
    nn::Activation act = nn::Activation::Tanh;
    double init_scale = 1.0;
    bool share_weights = false;  // one network reused at every step
};

// One feedback network per time step (or one shared network), all living in a
// joint ParamStore. `out_dim` is the raw network output width; the simulator
// maps it onto the feasible control set.
class PolicyStack {
public:
    PolicyStack(int horizon, int state_dim, int out_dim, PolicySpec spec);

    void init(std::uint64_t seed, std::uint64_t stream);

    int horizon() const { return horizon_; }
    int state_dim() const { return state_dim_; }
    int out_dim() const { return out_dim_; }
    const nn::Mlp& net(int t) const { return nets_[spec_.share_weights ? 0 : static_cast<std::size_t>(t)]; }
    nn::ParamStore& params() { return store_; }
    const nn::ParamStore& params() const { return store_; }

private:
    int horizon_, state_dim_, out_dim_;
    PolicySpec spec_;
    nn::ParamStore store_;
    std::vector<nn::Mlp> nets_;
};

}  // namespace mlnum::control
