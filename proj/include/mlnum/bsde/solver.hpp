#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mlnum/bsde/pde_problem.hpp"
#include "mlnum/nn/grad_tape.hpp"
#include "mlnum/nn/mlp.hpp"
#include "mlnum/nn/param_store.hpp"
#include "mlnum/sde/brownian.hpp"
#include "mlnum/sde/euler.hpp"
#include "mlnum/sde/time_grid.hpp"

namespace mlnum::bsde {

struct BsdeSolverSpec {
    int d = 1;
    int N = 2;
    std::vector<int> hidden;  // hidden widths; empty means {d + 10, d + 10}
    nn::Activation act = nn::Activation::Relu;
    double init_scale = 1.0;
    double y0_lo = 0.0, y0_hi = 1.0;    // uniform init range for y0
    double z0_lo = -0.1, z0_hi = 0.1;   // uniform init range for z0 entries
};

// Trainable objects of the terminal-matching method: the scalar y0 and vector
// z0 at the start point, plus one Z-subnetwork per interior step t_1..t_{N-1},
// each mapping x to an approximation of Sigma^T grad u(t_n, x).
class BsdeSolver {
public:
    explicit BsdeSolver(BsdeSolverSpec spec);

    void init(std::uint64_t seed, std::uint64_t stream);

    const BsdeSolverSpec& spec() const { return spec_; }
    int n_subnets() const { return spec_.N - 1; }
    nn::ParamStore& params() { return store_; }
    const nn::ParamStore& params() const { return store_; }

    double y0() const { return store_.view("y0")[0]; }
    std::span<const double> z0() const { return store_.view("z0"); }
    std::span<double> z0() { return store_.view("z0"); }
    void set_y0(double v) { store_.view("y0")[0] = v; }

    struct RolloutStats {
        double loss = 0.0;
        bool finite = true;
        int bad_sample = -1;
        int bad_step = -1;
    };

    // Fused loss / gradient over one Brownian batch. `grad` may be empty for
    // a loss-only pass; X must come from euler_maruyama on the same batch.
    RolloutStats rollout_loss_grad(const PdeProblem& problem, const sde::TimeGrid& grid,
                                   const sde::StatePathBatch& X, const sde::BrownianBatch& dW,
                                   std::span<double> grad, Exec exec = Exec::Parallel) const;

    // Convenience: simulates X internally, returns (loss, tape).
    nn::GradTape rollout_tape(const PdeProblem& problem, const sde::TimeGrid& grid,
                              const sde::BrownianBatch& dW, Exec exec = Exec::Parallel) const;

    double rollout_loss(const PdeProblem& problem, const sde::TimeGrid& grid,
                        const sde::BrownianBatch& dW, Exec exec = Exec::Parallel) const;

private:
    BsdeSolverSpec spec_;
    nn::ParamStore store_;
    std::vector<nn::Mlp> subnets_;
};

}  // namespace mlnum::bsde
