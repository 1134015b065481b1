#include "mlnum/nn/two_layer.hpp"

#include <cmath>
#include <stdexcept>

#include "mlnum/core/compensated.hpp"
#include "mlnum/core/gaussian.hpp"

namespace mlnum::nn {

ScaledTwoLayerNet::ScaledTwoLayerNet(TwoLayerSpec spec) : spec_(spec) {
    if (spec_.d < 1 || spec_.m < 1)
        throw std::invalid_argument("two-layer net requires d >= 1 and m >= 1");
    params_.add("a", static_cast<std::size_t>(spec_.m));
    params_.add("w", static_cast<std::size_t>(spec_.m) * spec_.d);
}

void ScaledTwoLayerNet::init_uniform(std::uint64_t seed, std::uint64_t stream, double w_lo,
                                     double w_hi, double a_lo, double a_hi) {
    RngStream rng(seed, stream);
    for (double& v : a()) v = rng.uniform(a_lo, a_hi);
    for (double& v : w()) v = rng.uniform(w_lo, w_hi);
}

double ScaledTwoLayerNet::forward(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != spec_.d)
        throw std::invalid_argument("two-layer forward: input dimension mismatch");
    const auto av = a();
    const auto wv = w();
    NeumaierSum sum;
    for (int j = 0; j < spec_.m; ++j) {
        const double s = dot(wv.data() + static_cast<std::size_t>(j) * spec_.d, x.data(),
                             static_cast<std::size_t>(spec_.d));
        sum.add(av[j] * act(spec_.act, s));
    }
    const double total = sum.value();
    return spec_.unscaled ? total : total / static_cast<double>(spec_.m);
}

double ScaledTwoLayerNet::path_norm() const {
    const auto av = a();
    const auto wv = w();
    NeumaierSum sum;
    for (int j = 0; j < spec_.m; ++j) {
        double l1 = 0.0;
        for (int k = 0; k < spec_.d; ++k)
            l1 += std::abs(wv[static_cast<std::size_t>(j) * spec_.d + k]);
        sum.add(av[j] * av[j] * l1 * l1);
    }
    return std::sqrt(sum.value() / static_cast<double>(spec_.m));
}

double ScaledTwoLayerNet::risk(std::span<const double> X, std::span<const double> y,
                               int n) const {
    if (n < 1) throw std::invalid_argument("risk: empty batch");
    if (X.size() != static_cast<std::size_t>(n) * spec_.d || y.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("risk: batch shape mismatch");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = forward(X.subspan(static_cast<std::size_t>(i) * spec_.d, spec_.d));
        const double e = f - y[i];
        acc += e * e;
    }
    return acc / static_cast<double>(n);
}

void ScaledTwoLayerNet::risk_grad(std::span<const double> X, std::span<const double> y, int n,
                                  std::span<double> grad) const {
    if (grad.size() != params_.size())
        throw std::invalid_argument("risk_grad: gradient length mismatch");
    const auto av = a();
    const auto wv = w();
    const int d = spec_.d, m = spec_.m;
    double* ga = grad.data();
    double* gw = grad.data() + m;
    for (double& g : grad) g = 0.0;

    // Sample-major accumulation; every accumulator sees samples in ascending
    // order, matching the particle-major route in the mean-field module.
    for (int i = 0; i < n; ++i) {
        const double* xi = X.data() + static_cast<std::size_t>(i) * d;
        const double f = forward(std::span<const double>(xi, static_cast<std::size_t>(d)));
        const double coeff = detail::tl_sample_coeff(f - y[i], n, m, spec_.unscaled);
        for (int j = 0; j < m; ++j) {
            const double* wj = wv.data() + static_cast<std::size_t>(j) * d;
            const double s = dot(wj, xi, static_cast<std::size_t>(d));
            ga[j] += detail::tl_grad_a_term(coeff, spec_.act, s);
            for (int k = 0; k < d; ++k)
                gw[static_cast<std::size_t>(j) * d + k] +=
                    detail::tl_grad_w_term(coeff, av[j], spec_.act, s, xi[k]);
        }
    }
}

GradTape ScaledTwoLayerNet::risk_tape(std::span<const double> X, std::span<const double> y,
                                      int n) const {
    GradTape tape(params_.size(), risk(X, y, n));
    std::vector<double> Xc(X.begin(), X.end());
    std::vector<double> yc(y.begin(), y.end());
    tape.set_backward([this, Xc = std::move(Xc), yc = std::move(yc), n](std::vector<double>& g) {
        risk_grad(Xc, yc, n, g);
    });
    return tape;
}

GradTape ScaledTwoLayerNet::output_tape(std::span<const double> x) const {
    GradTape tape(params_.size(), forward(x));
    std::vector<double> xc(x.begin(), x.end());
    tape.set_backward([this, xc = std::move(xc)](std::vector<double>& g) {
        const auto av = a();
        const auto wv = w();
        const int d = spec_.d, m = spec_.m;
        const double scale = spec_.unscaled ? 1.0 : 1.0 / static_cast<double>(m);
        for (int j = 0; j < m; ++j) {
            const double* wj = wv.data() + static_cast<std::size_t>(j) * d;
            const double s = dot(wj, xc.data(), static_cast<std::size_t>(d));
            g[j] = scale * act(spec_.act, s);
            const double coef = scale * av[j] * act_deriv(spec_.act, s);
            for (int k = 0; k < d; ++k) g[static_cast<std::size_t>(m + j * d + k)] = coef * xc[k];
        }
    });
    return tape;
}

}  // namespace mlnum::nn
