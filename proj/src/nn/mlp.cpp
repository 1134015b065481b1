#include "mlnum/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "mlnum/core/compensated.hpp"

namespace mlnum::nn {

Mlp::Mlp(const std::string& prefix, MlpSpec spec, ParamStore& store) : spec_(std::move(spec)) {
    if (spec_.widths.size() < 2) throw std::invalid_argument("Mlp needs at least two widths");
    for (int w : spec_.widths)
        if (w < 1) throw std::invalid_argument("Mlp widths must be positive");
    for (std::size_t l = 0; l + 1 < spec_.widths.size(); ++l) {
        const int in = spec_.widths[l], out = spec_.widths[l + 1];
        const std::string base = prefix + "/";
        store.add(base + "W" + std::to_string(l), static_cast<std::size_t>(out) * in);
        store.add(base + "b" + std::to_string(l), static_cast<std::size_t>(out));
        layers_.push_back({store.slice(base + "W" + std::to_string(l)).offset,
                           store.slice(base + "b" + std::to_string(l)).offset, in, out});
    }
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.out) * l.in + l.out;
    return n;
}

void Mlp::forward(const ParamStore& store, std::span<const double> X, int B,
                  std::span<double> Y, Cache* cache) const {
    const int n_layers = n_affine();
    if (static_cast<int>(X.size()) != B * in_dim())
        throw std::invalid_argument("Mlp::forward: input shape mismatch");
    if (static_cast<int>(Y.size()) != B * out_dim())
        throw std::invalid_argument("Mlp::forward: output shape mismatch");
    const double* theta = store.data().data();

    if (cache) {
        cache->B = B;
        cache->pre.assign(static_cast<std::size_t>(n_layers), {});
        cache->hidden.assign(static_cast<std::size_t>(n_layers - 1), {});
    }

    std::vector<double> cur(X.begin(), X.end());
    for (int l = 0; l < n_layers; ++l) {
        const Layer& L = layers_[static_cast<std::size_t>(l)];
        std::vector<double> pre(static_cast<std::size_t>(B) * L.out);
        const double* W = theta + L.w_off;
        const double* b = theta + L.b_off;
        for (int i = 0; i < B; ++i) {
            const double* xi = cur.data() + static_cast<std::size_t>(i) * L.in;
            double* pi = pre.data() + static_cast<std::size_t>(i) * L.out;
            for (int o = 0; o < L.out; ++o)
                pi[o] = b[o] + dot(W + static_cast<std::size_t>(o) * L.in, xi,
                                   static_cast<std::size_t>(L.in));
        }
        const bool last = (l == n_layers - 1);
        if (last) {
            std::copy(pre.begin(), pre.end(), Y.begin());
        } else {
            std::vector<double> actv(pre.size());
            for (std::size_t k = 0; k < pre.size(); ++k) actv[k] = act(spec_.act, pre[k]);
            if (cache) cache->hidden[static_cast<std::size_t>(l)] = actv;
            cur = std::move(actv);
        }
        if (cache) cache->pre[static_cast<std::size_t>(l)] = std::move(pre);
    }
}

void Mlp::backward(const ParamStore& store, std::span<const double> X, const Cache& cache,
                   std::span<const double> dY, int B, std::span<double> grad,
                   std::span<double> dX) const {
    const int n_layers = n_affine();
    if (cache.B != B) throw std::invalid_argument("Mlp::backward: cache batch mismatch");
    if (grad.size() != store.size())
        throw std::invalid_argument("Mlp::backward: gradient length mismatch");
    const double* theta = store.data().data();

    std::vector<double> dpre(dY.begin(), dY.end());
    for (int l = n_layers - 1; l >= 0; --l) {
        const Layer& L = layers_[static_cast<std::size_t>(l)];
        const double* A_prev = (l == 0) ? X.data() : cache.hidden[static_cast<std::size_t>(l - 1)].data();
        double* gW = grad.data() + L.w_off;
        double* gb = grad.data() + L.b_off;
        // Sample-ascending accumulation keeps per-chunk grads deterministic.
        for (int i = 0; i < B; ++i) {
            const double* dp = dpre.data() + static_cast<std::size_t>(i) * L.out;
            const double* ai = A_prev + static_cast<std::size_t>(i) * L.in;
            for (int o = 0; o < L.out; ++o) {
                const double g = dp[o];
                gb[o] += g;
                double* row = gW + static_cast<std::size_t>(o) * L.in;
                for (int k = 0; k < L.in; ++k) row[k] += g * ai[k];
            }
        }
        const bool need_dx = (l > 0) || !dX.empty();
        if (!need_dx) break;
        std::vector<double> dA(static_cast<std::size_t>(B) * L.in, 0.0);
        const double* W = theta + L.w_off;
        for (int i = 0; i < B; ++i) {
            const double* dp = dpre.data() + static_cast<std::size_t>(i) * L.out;
            double* da = dA.data() + static_cast<std::size_t>(i) * L.in;
            for (int o = 0; o < L.out; ++o) {
                const double g = dp[o];
                const double* row = W + static_cast<std::size_t>(o) * L.in;
                for (int k = 0; k < L.in; ++k) da[k] += g * row[k];
            }
        }
        if (l == 0) {
            if (!dX.empty()) std::copy(dA.begin(), dA.end(), dX.begin());
            break;
        }
        const auto& pre_prev = cache.pre[static_cast<std::size_t>(l - 1)];
        dpre.assign(dA.size(), 0.0);
        for (std::size_t k = 0; k < dA.size(); ++k)
            dpre[k] = dA[k] * act_deriv(spec_.act, pre_prev[k]);
    }
}

void Mlp::init_glorot_uniform(ParamStore& store, RngStream& rng, double scale) const {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& L = layers_[l];
        const double r = scale * std::sqrt(6.0 / static_cast<double>(L.in + L.out));
        auto theta = store.data();
        for (std::size_t k = 0; k < static_cast<std::size_t>(L.out) * L.in; ++k)
            theta[L.w_off + k] = rng.uniform(-r, r);
        for (int k = 0; k < L.out; ++k) theta[L.b_off + static_cast<std::size_t>(k)] = 0.0;
    }
}

}  // namespace mlnum::nn
