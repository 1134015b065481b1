#include "mlnum/pmp/msa.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlnum/core/compensated.hpp"
#include "mlnum/core/gaussian.hpp"
#include "mlnum/core/philox.hpp"

namespace mlnum::pmp {

namespace {

// Per-sample slots a layer maximization needs: the cached state, downstream
// costate, and the feasibility targets (v, q) frozen at the sweep parameters.
struct LayerSlots {
    std::vector<double> z;  // n x D
    std::vector<double> p;  // n x D (costate at l+1)
    std::vector<double> v;  // n x D
    std::vector<double> q;  // n x D
};

double penalty_norm2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Mean over samples of H~ at particle block (a, w).
double layer_objective(const LayerSlots& slots, int n, int M, int D, nn::Activation act,
                       std::span<const double> a, std::span<const double> w, double lambda,
                       std::vector<double>& fbuf, std::vector<double>& gbuf) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = std::span<const double>(slots.z).subspan(static_cast<std::size_t>(i) * D, static_cast<std::size_t>(D));
        const auto p = std::span<const double>(slots.p).subspan(static_cast<std::size_t>(i) * D, static_cast<std::size_t>(D));
        double val = hamiltonian(z, p, a, w, M, D, act);
        if (lambda > 0.0) {
            layer_drift(z, a, w, M, D, act, fbuf);
            hamiltonian_grad_z(z, p, a, w, M, D, act, gbuf);
            const auto v = std::span<const double>(slots.v).subspan(static_cast<std::size_t>(i) * D, static_cast<std::size_t>(D));
            const auto q = std::span<const double>(slots.q).subspan(static_cast<std::size_t>(i) * D, static_cast<std::size_t>(D));
            double p1 = 0.0, p2 = 0.0;
            for (int k = 0; k < D; ++k) {
                const double d1 = v[static_cast<std::size_t>(k)] - fbuf[static_cast<std::size_t>(k)];
                const double d2 = q[static_cast<std::size_t>(k)] + gbuf[static_cast<std::size_t>(k)];
                p1 += d1 * d1;
                p2 += d2 * d2;
            }
            val -= 0.5 * lambda * (p1 + p2);
        }
        acc += val;
    }
    return acc / static_cast<double>(n);
}

// Ascent gradient of layer_objective w.r.t. the particle block.
void layer_ascent_grad(const LayerSlots& slots, int n, int M, int D, nn::Activation act,
                       std::span<const double> a, std::span<const double> w, double lambda,
                       std::span<double> ga, std::span<double> gw, std::vector<double>& fbuf,
                       std::vector<double>& gbuf) {
    for (double& g : ga) g = 0.0;
    for (double& g : gw) g = 0.0;
    const double invMn = 1.0 / (static_cast<double>(M) * static_cast<double>(n));

    for (int i = 0; i < n; ++i) {
        const double* z = slots.z.data() + static_cast<std::size_t>(i) * D;
        const double* p = slots.p.data() + static_cast<std::size_t>(i) * D;
        const double* v = slots.v.data() + static_cast<std::size_t>(i) * D;
        const double* q = slots.q.data() + static_cast<std::size_t>(i) * D;

        if (lambda > 0.0) {
            layer_drift(std::span<const double>(z, static_cast<std::size_t>(D)), a, w, M, D, act, fbuf);
            hamiltonian_grad_z(std::span<const double>(z, static_cast<std::size_t>(D)),
                               std::span<const double>(p, static_cast<std::size_t>(D)), a, w, M, D, act, gbuf);
            for (int k = 0; k < D; ++k) {
                fbuf[static_cast<std::size_t>(k)] = v[k] - fbuf[static_cast<std::size_t>(k)];   // Delta1
                gbuf[static_cast<std::size_t>(k)] = q[k] + gbuf[static_cast<std::size_t>(k)];   // Gamma
            }
        }

        for (int j = 0; j < M; ++j) {
            const double* aj = a.data() + static_cast<std::size_t>(j) * D;
            const double* wj = w.data() + static_cast<std::size_t>(j) * D;
            const double s = dot(wj, z, static_cast<std::size_t>(D));
            const double sig = nn::act(act, s);
            const double dsig = nn::act_deriv(act, s);
            const double padot = dot(aj, p, static_cast<std::size_t>(D));
            double* gaj = ga.data() + static_cast<std::size_t>(j) * D;
            double* gwj = gw.data() + static_cast<std::size_t>(j) * D;

            // d/d theta of mean H
            for (int k = 0; k < D; ++k) {
                gaj[k] += invMn * sig * p[k];
                gwj[k] += invMn * dsig * padot * z[k];
            }
            if (lambda > 0.0) {
                const double d2sig = nn::act_deriv2(act, s);
                const double adot_delta = dot(aj, fbuf.data(), static_cast<std::size_t>(D));
                const double wdot_gamma = dot(wj, gbuf.data(), static_cast<std::size_t>(D));
                for (int k = 0; k < D; ++k) {
                    // -lambda/2 |v - f|^2 term
                    gaj[k] += lambda * invMn * sig * fbuf[static_cast<std::size_t>(k)];
                    gwj[k] += lambda * invMn * dsig * adot_delta * z[k];
                    // -lambda/2 |q + grad_z H|^2 term
                    gaj[k] -= lambda * invMn * dsig * wdot_gamma * p[k];
                    gwj[k] -= lambda * invMn * padot *
                              (d2sig * wdot_gamma * z[k] + dsig * gbuf[static_cast<std::size_t>(k)]);
                }
            }
        }
    }
}

MsaResult run_msa(nn::ScaledResNet& net, const meanfield::SupervisedDataset& data,
                  const MsaConfig& cfg, double lambda) {
    if (cfg.outer_iters < 1) throw std::invalid_argument("msa: outer_iters >= 1 required");
    if (lambda < 0.0) throw std::invalid_argument("msa: lambda_msa >= 0 required");
    const auto& spec = net.spec();
    const int L = spec.L, M = spec.M, D = net.lifted_dim(), n = data.n;

    MsaResult res;
    const auto t0 = std::chrono::steady_clock::now();
    const double loss0 = net.risk(data.X, data.y, n);
    RngStream start_rng(cfg.seed, stream_id("msa/starts"));

    std::vector<LayerSlots> slots(static_cast<std::size_t>(L));
    for (auto& s : slots) {
        s.z.resize(static_cast<std::size_t>(n) * D);
        s.p.resize(static_cast<std::size_t>(n) * D);
        s.v.resize(static_cast<std::size_t>(n) * D);
        s.q.resize(static_cast<std::size_t>(n) * D);
    }
    std::vector<double> fbuf(static_cast<std::size_t>(D)), gbuf(static_cast<std::size_t>(D));
    ForwardBackwardCache cache;

    for (int outer = 0; outer < cfg.outer_iters; ++outer) {
        // Solve states and costates once per sweep with the current params.
        for (int i = 0; i < n; ++i) {
            forward_backward(net, std::span<const double>(data.X).subspan(static_cast<std::size_t>(i) * spec.d, static_cast<std::size_t>(spec.d)),
                             data.y[static_cast<std::size_t>(i)], cache);
            for (int l = 0; l < L; ++l) {
                auto& s = slots[static_cast<std::size_t>(l)];
                const double* zl = cache.z.data() + static_cast<std::size_t>(l) * D;
                const double* pn = cache.p.data() + static_cast<std::size_t>(l + 1) * D;
                for (int k = 0; k < D; ++k) {
                    s.z[static_cast<std::size_t>(i) * D + k] = zl[k];
                    s.p[static_cast<std::size_t>(i) * D + k] = pn[k];
                }
                if (lambda > 0.0) {
                    const auto a = net.params().view("l" + std::to_string(l) + "/a");
                    const auto w = net.params().view("l" + std::to_string(l) + "/w");
                    layer_drift(std::span<const double>(zl, static_cast<std::size_t>(D)), a, w, M, D, spec.act, fbuf);
                    hamiltonian_grad_z(std::span<const double>(zl, static_cast<std::size_t>(D)),
                                       std::span<const double>(pn, static_cast<std::size_t>(D)), a, w, M, D,
                                       spec.act, gbuf);
                    for (int k = 0; k < D; ++k) {
                        s.v[static_cast<std::size_t>(i) * D + k] = fbuf[static_cast<std::size_t>(k)];
                        s.q[static_cast<std::size_t>(i) * D + k] = -gbuf[static_cast<std::size_t>(k)];
                    }
                }
            }
        }
        res.grad_evals += n;

        // Layer maximizations, all against the sweep caches.
        long budget_used = 0;
        for (int l = 0; l < L; ++l) {
            auto a_view = net.params().view("l" + std::to_string(l) + "/a");
            auto w_view = net.params().view("l" + std::to_string(l) + "/w");
            std::vector<double> best_a(a_view.begin(), a_view.end());
            std::vector<double> best_w(w_view.begin(), w_view.end());
            double best_obj = -std::numeric_limits<double>::infinity();
            std::vector<double> ga(best_a.size()), gw(best_w.size());

            for (int start = 0; start < std::max(1, cfg.inner_starts); ++start) {
                std::vector<double> a(a_view.begin(), a_view.end());
                std::vector<double> w(w_view.begin(), w_view.end());
                if (start > 0) {
                    for (double& vv : a) vv += cfg.start_jitter * start_rng.uniform(-1.0, 1.0);
                    for (double& vv : w) vv += cfg.start_jitter * start_rng.uniform(-1.0, 1.0);
                }
                for (int step = 0; step < cfg.inner_steps; ++step) {
                    layer_ascent_grad(slots[static_cast<std::size_t>(l)], n, M, D, spec.act, a, w,
                                      lambda, ga, gw, fbuf, gbuf);
                    for (std::size_t k = 0; k < a.size(); ++k) a[k] += cfg.inner_lr * ga[k];
                    for (std::size_t k = 0; k < w.size(); ++k) w[k] += cfg.inner_lr * gw[k];
                    ++budget_used;
                }
                const double obj = layer_objective(slots[static_cast<std::size_t>(l)], n, M, D,
                                                   spec.act, a, w, lambda, fbuf, gbuf);
                if (obj > best_obj) {
                    best_obj = obj;
                    best_a = std::move(a);
                    best_w = std::move(w);
                }
            }
            std::copy(best_a.begin(), best_a.end(), a_view.begin());
            std::copy(best_w.begin(), best_w.end(), w_view.begin());
        }
        res.grad_evals += static_cast<long>(cfg.inner_steps) * std::max(1, cfg.inner_starts) * n;

        const double loss = net.risk(data.X, data.y, n);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.record.push(outer, loss, static_cast<double>(budget_used), secs, cfg.seed);
        if (!std::isfinite(loss) || loss > cfg.divergence_guard * std::max(loss0, 1e-12)) {
            res.diverged = true;
            res.record.diverged = true;
            res.record.diverged_at = outer;
            break;
        }
    }
    return res;
}

}  // namespace

double extended_hamiltonian(std::span<const double> z, std::span<const double> p,
                            std::span<const double> a, std::span<const double> w, int M, int D,
                            nn::Activation act, std::span<const double> v,
                            std::span<const double> q, double lambda) {
    double val = hamiltonian(z, p, a, w, M, D, act);
    if (lambda > 0.0) {
        std::vector<double> f(static_cast<std::size_t>(D)), g(static_cast<std::size_t>(D));
        layer_drift(z, a, w, M, D, act, f);
        hamiltonian_grad_z(z, p, a, w, M, D, act, g);
        for (int k = 0; k < D; ++k) g[static_cast<std::size_t>(k)] = -g[static_cast<std::size_t>(k)];
        val -= 0.5 * lambda * penalty_norm2(v, f);
        val -= 0.5 * lambda * penalty_norm2(q, g);
    }
    return val;
}

MsaResult basic_msa(nn::ScaledResNet& net, const meanfield::SupervisedDataset& data,
                    const MsaConfig& cfg) {
    return run_msa(net, data, cfg, 0.0);
}

MsaResult extended_msa(nn::ScaledResNet& net, const meanfield::SupervisedDataset& data,
                       const MsaConfig& cfg) {
    return run_msa(net, data, cfg, cfg.lambda_msa);
}

MsaResult train_resnet_sgd(nn::ScaledResNet& net, const meanfield::SupervisedDataset& data,
                           const ResnetSgdConfig& cfg) {
    if (cfg.iters < 1 || cfg.batch < 1)
        throw std::invalid_argument("resnet sgd: positive iters and batch required");
    const int d = net.spec().d;
    auto opt = cfg.kind == nn::OptKind::Adam ? nn::OptimizerState::adam(cfg.eta)
                                             : nn::OptimizerState::sgd(cfg.eta);
    RngStream rng(cfg.seed, stream_id("msa/sgd"));
    std::vector<double> Xb(static_cast<std::size_t>(cfg.batch) * d), yb(static_cast<std::size_t>(cfg.batch));
    std::vector<double> grad(net.params().size());

    MsaResult res;
    const auto t0 = std::chrono::steady_clock::now();
    for (int it = 0; it < cfg.iters; ++it) {
        for (int i = 0; i < cfg.batch; ++i) {
            const auto row = static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(data.n)));
            for (int k = 0; k < d; ++k) Xb[static_cast<std::size_t>(i) * d + k] = data.X[row * d + k];
            yb[static_cast<std::size_t>(i)] = data.y[row];
        }
        net.risk_grad(Xb, yb, cfg.batch, grad);
        if (!opt.apply(net.params(), grad)) {
            res.diverged = true;
            res.record.diverged = true;
            res.record.diverged_at = it;
            break;
        }
        res.grad_evals += cfg.batch;
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.record.push(it, net.risk(Xb, yb, cfg.batch), 0.0, secs, cfg.seed);
    }
    return res;
}

}  // namespace mlnum::pmp
