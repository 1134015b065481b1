#include "mlnum/bsde/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mlnum/core/compensated.hpp"
#include "mlnum/core/gaussian.hpp"
#include "mlnum/core/parallel.hpp"

namespace mlnum::bsde {

BsdeSolver::BsdeSolver(BsdeSolverSpec spec) : spec_(std::move(spec)) {
    if (spec_.d < 1 || spec_.N < 1) throw std::invalid_argument("BsdeSolver: d, N >= 1 required");
    store_.add("y0", 1);
    store_.add("z0", static_cast<std::size_t>(spec_.d));
    std::vector<int> hidden = spec_.hidden;
    if (hidden.empty()) hidden = {spec_.d + 10, spec_.d + 10};
    std::vector<int> widths;
    widths.push_back(spec_.d);
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(spec_.d);
    subnets_.reserve(static_cast<std::size_t>(n_subnets()));
    for (int n = 1; n < spec_.N; ++n)
        subnets_.emplace_back("zsub" + std::to_string(n), nn::MlpSpec{widths, spec_.act}, store_);
}

void BsdeSolver::init(std::uint64_t seed, std::uint64_t stream) {
    RngStream rng(seed, stream);
    store_.view("y0")[0] = rng.uniform(spec_.y0_lo, spec_.y0_hi);
    for (double& v : store_.view("z0")) v = rng.uniform(spec_.z0_lo, spec_.z0_hi);
    for (const auto& net : subnets_) net.init_glorot_uniform(store_, rng, spec_.init_scale);
}

BsdeSolver::RolloutStats BsdeSolver::rollout_loss_grad(const PdeProblem& problem,
                                                       const sde::TimeGrid& grid,
                                                       const sde::StatePathBatch& X,
                                                       const sde::BrownianBatch& dW,
                                                       std::span<double> grad, Exec exec) const {
    const int d = spec_.d, N = spec_.N;
    if (grid.N != N) throw std::invalid_argument("rollout: grid does not match solver N");
    if (dW.d != d || X.d != d || X.N != N || dW.N != N || X.B != dW.B)
        throw std::invalid_argument("rollout: batch shape mismatch");
    const bool want_grad = !grad.empty();
    if (want_grad && grad.size() != store_.size())
        throw std::invalid_argument("rollout: gradient length mismatch");

    const int B = dW.B;
    const double dt = grid.dt();
    const std::size_t n_params = store_.size();
    const std::size_t nc = chunk_count(static_cast<std::size_t>(B), kDefaultChunk);

    std::vector<double> chunk_loss(nc, 0.0);
    std::vector<int> chunk_bad_sample(nc, -1), chunk_bad_step(nc, -1);
    std::vector<std::vector<double>> chunk_grad(want_grad ? nc : 0);

    for_chunks(static_cast<std::size_t>(B), kDefaultChunk, exec,
               [&](std::size_t c, std::size_t cb, std::size_t ce) {
        const int Bc = static_cast<int>(ce - cb);
        // Per-chunk workspaces: states of Y, Z values, subnet caches.
        std::vector<double> Y(static_cast<std::size_t>(N + 1) * Bc);
        std::vector<double> Z(static_cast<std::size_t>(N) * Bc * d);
        std::vector<double> Xn(static_cast<std::size_t>(Bc) * d);
        std::vector<nn::Mlp::Cache> caches(want_grad ? static_cast<std::size_t>(n_subnets()) : 0);
        nn::Mlp::Cache scratch;

        const double y0v = store_.view("y0")[0];
        const auto z0v = store_.view("z0");
        for (int i = 0; i < Bc; ++i) Y[static_cast<std::size_t>(i)] = y0v;

        int bad_sample = -1, bad_step = -1;
        for (int n = 0; n < N && bad_step < 0; ++n) {
            double* Zn = Z.data() + static_cast<std::size_t>(n) * Bc * d;
            if (n == 0) {
                for (int i = 0; i < Bc; ++i)
                    for (int k = 0; k < d; ++k) Zn[static_cast<std::size_t>(i) * d + k] = z0v[static_cast<std::size_t>(k)];
            } else {
                for (int i = 0; i < Bc; ++i) {
                    const double* x = X.at(static_cast<int>(cb) + i, n);
                    for (int k = 0; k < d; ++k) Xn[static_cast<std::size_t>(i) * d + k] = x[k];
                }
                subnets_[static_cast<std::size_t>(n - 1)].forward(
                    store_, Xn, Bc, std::span<double>(Zn, static_cast<std::size_t>(Bc) * d),
                    want_grad ? &caches[static_cast<std::size_t>(n - 1)] : &scratch);
            }
            const double t = grid.t(n);
            for (int i = 0; i < Bc; ++i) {
                const double* x = X.at(static_cast<int>(cb) + i, n);
                const double* z = Zn + static_cast<std::size_t>(i) * d;
                const double* w = dW.at(static_cast<int>(cb) + i, n);
                const double yn = Y[static_cast<std::size_t>(n) * Bc + i];
                double hval = 0.0;
                if (problem.h)
                    hval = problem.h(t, std::span<const double>(x, d), yn,
                                     std::span<const double>(z, d));
                const double ynext = yn - hval * dt + dot(z, w, static_cast<std::size_t>(d));
                Y[static_cast<std::size_t>(n + 1) * Bc + i] = ynext;
                if (!std::isfinite(ynext) && bad_step < 0) {
                    bad_sample = static_cast<int>(cb) + i;
                    bad_step = n + 1;
                }
            }
        }

        if (bad_step >= 0) {
            chunk_bad_sample[c] = bad_sample;
            chunk_bad_step[c] = bad_step;
            return;
        }

        double loss_acc = 0.0;
        std::vector<double> adj(static_cast<std::size_t>(Bc));
        for (int i = 0; i < Bc; ++i) {
            const double gT = problem.g(std::span<const double>(X.at(static_cast<int>(cb) + i, N), d));
            const double e = gT - Y[static_cast<std::size_t>(N) * Bc + i];
            loss_acc += e * e;
            adj[static_cast<std::size_t>(i)] = 2.0 * (Y[static_cast<std::size_t>(N) * Bc + i] - gT) /
                                               static_cast<double>(B);
        }
        chunk_loss[c] = loss_acc;
        if (!want_grad) return;

        auto& cg = chunk_grad[c];
        cg.assign(n_params, 0.0);
        std::vector<double> dZ(static_cast<std::size_t>(Bc) * d);
        std::vector<double> hz(static_cast<std::size_t>(d));
        const auto sl_y0 = store_.slice("y0");
        const auto sl_z0 = store_.slice("z0");

        for (int n = N - 1; n >= 0; --n) {
            const double t = grid.t(n);
            const double* Zn = Z.data() + static_cast<std::size_t>(n) * Bc * d;
            for (int i = 0; i < Bc; ++i) {
                const double* x = X.at(static_cast<int>(cb) + i, n);
                const double* z = Zn + static_cast<std::size_t>(i) * d;
                const double* w = dW.at(static_cast<int>(cb) + i, n);
                const double yn = Y[static_cast<std::size_t>(n) * Bc + i];
                const double a = adj[static_cast<std::size_t>(i)];
                if (problem.h_dz) {
                    problem.h_dz(t, std::span<const double>(x, d), yn,
                                 std::span<const double>(z, d), hz);
                    for (int k = 0; k < d; ++k)
                        dZ[static_cast<std::size_t>(i) * d + k] = a * (w[k] - hz[static_cast<std::size_t>(k)] * dt);
                } else {
                    for (int k = 0; k < d; ++k) dZ[static_cast<std::size_t>(i) * d + k] = a * w[k];
                }
                if (problem.h_dy) {
                    const double hy = problem.h_dy(t, std::span<const double>(x, d), yn,
                                                   std::span<const double>(z, d));
                    adj[static_cast<std::size_t>(i)] = a * (1.0 - hy * dt);
                }
            }
            if (n == 0) {
                double* gz0 = cg.data() + sl_z0.offset;
                for (int i = 0; i < Bc; ++i)
                    for (int k = 0; k < d; ++k) gz0[k] += dZ[static_cast<std::size_t>(i) * d + k];
            } else {
                for (int i = 0; i < Bc; ++i) {
                    const double* x = X.at(static_cast<int>(cb) + i, n);
                    for (int k = 0; k < d; ++k) Xn[static_cast<std::size_t>(i) * d + k] = x[k];
                }
                subnets_[static_cast<std::size_t>(n - 1)].backward(
                    store_, Xn, caches[static_cast<std::size_t>(n - 1)], dZ, Bc, cg, {});
            }
        }
        double gy0 = 0.0;
        for (int i = 0; i < Bc; ++i) gy0 += adj[static_cast<std::size_t>(i)];
        cg[sl_y0.offset] += gy0;
    });

    RolloutStats stats;
    for (std::size_t c = 0; c < nc; ++c) {
        if (chunk_bad_step[c] >= 0) {
            stats.finite = false;
            stats.bad_sample = chunk_bad_sample[c];
            stats.bad_step = chunk_bad_step[c];
            stats.loss = std::numeric_limits<double>::quiet_NaN();
            return stats;
        }
    }
    double loss = 0.0;
    for (double l : chunk_loss) loss += l;
    stats.loss = loss / static_cast<double>(B);
    if (want_grad) {
        for (double& g : grad) g = 0.0;
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t i = 0; i < n_params; ++i) grad[i] += chunk_grad[c][i];
    }
    if (!std::isfinite(stats.loss)) {
        stats.finite = false;
        stats.bad_step = N;
    }
    return stats;
}

nn::GradTape BsdeSolver::rollout_tape(const PdeProblem& problem, const sde::TimeGrid& grid,
                                      const sde::BrownianBatch& dW, Exec exec) const {
    auto X = sde::euler_maruyama(problem.dynamics, grid, problem.xi, dW, exec);
    std::vector<double> grad(store_.size(), 0.0);
    auto stats = rollout_loss_grad(problem, grid, X, dW, grad, exec);
    if (!stats.finite)
        throw std::runtime_error("rollout: non-finite loss, first blow-up at sample " +
                                 std::to_string(stats.bad_sample) + ", step " +
                                 std::to_string(stats.bad_step));
    nn::GradTape tape(store_.size(), stats.loss);
    tape.mutable_grad() = std::move(grad);
    return tape;
}

double BsdeSolver::rollout_loss(const PdeProblem& problem, const sde::TimeGrid& grid,
                                const sde::BrownianBatch& dW, Exec exec) const {
    auto X = sde::euler_maruyama(problem.dynamics, grid, problem.xi, dW, exec);
    auto stats = rollout_loss_grad(problem, grid, X, dW, {}, exec);
    return stats.loss;
}

}  // namespace mlnum::bsde
