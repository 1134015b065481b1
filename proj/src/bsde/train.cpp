#include "mlnum/bsde/train.hpp"

#include <chrono>

#include "mlnum/core/philox.hpp"

namespace mlnum::bsde {

TrainRecord train_bsde(BsdeSolver& solver, const PdeProblem& problem, const sde::TimeGrid& grid,
                       const BsdeTrainConfig& cfg) {
    if (cfg.batch < 1 || cfg.iters < 1)
        throw std::invalid_argument("train_bsde: batch and iters must be positive");

    auto opt = cfg.opt == nn::OptKind::Adam ? nn::OptimizerState::adam(cfg.eta)
                                            : nn::OptimizerState::sgd(cfg.eta);
    const std::uint64_t dw_base = stream_id("bsde/dW");
    std::vector<double> grad(solver.params().size());
    TrainRecord rec;
    const auto t0 = std::chrono::steady_clock::now();

    for (int it = 0; it < cfg.iters; ++it) {
        for (const auto& p : cfg.lr_schedule)
            if (p.step == it) opt.set_eta(p.eta);

        auto dW = sde::sample_brownian(grid, problem.d, cfg.batch, cfg.seed,
                                       substream(dw_base, static_cast<std::uint64_t>(it)),
                                       cfg.exec);
        auto X = sde::euler_maruyama(problem.dynamics, grid, problem.xi, dW, cfg.exec);
        auto stats = solver.rollout_loss_grad(problem, grid, X, dW, grad, cfg.exec);

        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!stats.finite) {
            rec.diverged = true;
            rec.diverged_at = it;
            rec.push(it, stats.loss, solver.y0(), secs, cfg.seed);
            return rec;
        }
        const bool stepped = opt.apply(solver.params(), grad);
        rec.push(it, stats.loss, solver.y0(), secs, cfg.seed);
        if (!stepped) {
            rec.diverged = true;
            rec.diverged_at = it;
            return rec;
        }
    }
    return rec;
}

}  // namespace mlnum::bsde
