#include "mlnum/meanfield/regularized.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mlnum::meanfield {

namespace {

// Subgradient of the path norm ((1/m) sum a_k^2 |w_k|_1^2)^(1/2); zero at the
// origin.
void path_norm_subgrad(const nn::ScaledTwoLayerNet& net, std::span<double> out) {
    const int m = net.spec().m, d = net.spec().d;
    const auto a = net.a();
    const auto w = net.w();
    const double P = net.path_norm();
    for (double& g : out) g = 0.0;
    if (P <= 1e-30) return;
    for (int j = 0; j < m; ++j) {
        double l1 = 0.0;
        for (int k = 0; k < d; ++k) l1 += std::abs(w[static_cast<std::size_t>(j) * d + k]);
        out[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)] * l1 * l1 / (static_cast<double>(m) * P);
        for (int k = 0; k < d; ++k) {
            const double wv = w[static_cast<std::size_t>(j) * d + k];
            const double sgn = wv > 0.0 ? 1.0 : (wv < 0.0 ? -1.0 : 0.0);
            out[static_cast<std::size_t>(m + j * d + k)] =
                a[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j)] * l1 * sgn / (static_cast<double>(m) * P);
        }
    }
}

}  // namespace

RegularizedReport regularized_train(nn::ScaledTwoLayerNet& net, const SupervisedDataset& train,
                                    double lambda, const RegularizedConfig& cfg,
                                    const SupervisedDataset& test) {
    if (lambda < 0.0) throw std::invalid_argument("regularized_train: lambda >= 0 required");
    if (train.d != net.spec().d) throw std::invalid_argument("regularized_train: dim mismatch");

    const double reg_scale =
        lambda * std::sqrt(std::log(2.0 * train.d) / static_cast<double>(train.n));
    std::vector<double> grad(net.params().size());
    std::vector<double> pgrad(lambda > 0.0 ? net.params().size() : 0);

    RegularizedReport rep;
    const auto t0 = std::chrono::steady_clock::now();
    for (int step = 0; step < cfg.steps; ++step) {
        net.risk_grad(train.X, train.y, train.n, grad);
        if (lambda > 0.0) {
            path_norm_subgrad(net, pgrad);
            for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += reg_scale * pgrad[i];
        }
        auto theta = net.params().data();
        for (std::size_t i = 0; i < grad.size(); ++i) theta[i] -= cfg.eta * grad[i];

        if (step % cfg.log_every == 0 || step == cfg.steps - 1) {
            const double risk = net.risk(train.X, train.y, train.n);
            if (!std::isfinite(risk)) {
                rep.diverged = true;
                break;
            }
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            rep.record.push(step, risk, net.path_norm(), secs, cfg.seed);
        }
    }
    rep.emp_risk = net.risk(train.X, train.y, train.n);
    rep.path_norm = net.path_norm();
    rep.test_risk = net.risk(test.X, test.y, test.n);
    return rep;
}

}  // namespace mlnum::meanfield
