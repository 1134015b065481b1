#include "mlnum/control/train.hpp"

#include <chrono>

#include "mlnum/core/philox.hpp"

namespace mlnum::control {

TrainRecord train_policies(const ControlProblem& problem, PolicyStack& stack,
                           const PolicyTrainConfig& cfg) {
    if (cfg.batch < 1 || cfg.iters < 1)
        throw std::invalid_argument("train_policies: batch and iters must be positive");

    auto opt = cfg.opt == nn::OptKind::Adam ? nn::OptimizerState::adam(cfg.eta)
                                            : nn::OptimizerState::sgd(cfg.eta);
    const std::uint64_t noise_base = stream_id("control/noise");
    std::vector<double> grad(stack.params().size());
    TrainRecord rec;
    const auto t0 = std::chrono::steady_clock::now();

    for (int it = 0; it < cfg.iters; ++it) {
        for (const auto& p : cfg.lr_schedule)
            if (p.step == it) opt.set_eta(p.eta);

        auto noise = sample_noise(problem, cfg.batch, cfg.seed,
                                  substream(noise_base, static_cast<std::uint64_t>(it)));
        auto stats = simulate_cost_grad(problem, stack, noise, cfg.batch, grad, cfg.exec);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!stats.finite) {
            rec.diverged = true;
            rec.diverged_at = it;
            rec.push(it, stats.mean_cost, stats.mean_cost, secs, cfg.seed);
            return rec;
        }
        const bool stepped = opt.apply(stack.params(), grad);
        rec.push(it, stats.mean_cost, stats.mean_cost, secs, cfg.seed);
        if (!stepped) {
            rec.diverged = true;
            rec.diverged_at = it;
            return rec;
        }
    }
    return rec;
}

double evaluate_policy(const ControlProblem& problem, const PolicyStack& stack, int B,
                       std::uint64_t seed, std::uint64_t stream, Exec exec) {
    auto noise = sample_noise(problem, B, seed, stream);
    return simulate_cost(problem, stack, noise, B, exec);
}

}  // namespace mlnum::control
