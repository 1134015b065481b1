#include "mlnum/meanfield/particle_flow.hpp"

#include <cmath>
#include <vector>

#include "mlnum/core/compensated.hpp"
#include "mlnum/core/philox.hpp"

namespace mlnum::meanfield {

namespace {

// Mean-field evaluation of the empirical measure (1/m) sum_j delta_{(a_j,w_j)}
// against the feature a sigma(w . x); operation-for-operation the same
// arithmetic as ScaledTwoLayerNet::forward.
double mean_field_eval(const std::vector<double>& a, const std::vector<double>& w, int m, int d,
                       nn::Activation act, const double* x) {
    NeumaierSum sum;
    for (int j = 0; j < m; ++j) {
        const double s = dot(w.data() + static_cast<std::size_t>(j) * d, x, static_cast<std::size_t>(d));
        sum.add(a[static_cast<std::size_t>(j)] * nn::act(act, s));
    }
    return sum.value() / static_cast<double>(m);
}

}  // namespace

ParticleFlowResult particle_flow_equivalence(const SupervisedDataset& data, int m, int steps,
                                             double eta, nn::Activation act, std::uint64_t seed) {
    const int d = data.d, n = data.n;

    // Route (ii): gradient descent on the parametric model.
    nn::ScaledTwoLayerNet net({d, m, act, false});
    net.init_uniform(seed, stream_id("particle_flow/init"), -1.0, 1.0, -1.0, 1.0);

    // Route (i): particle ensemble with the shared initialization.
    std::vector<double> a(net.a().begin(), net.a().end());
    std::vector<double> w(net.w().begin(), net.w().end());

    std::vector<double> grad(net.params().size());
    std::vector<double> vel_a(static_cast<std::size_t>(m));
    std::vector<double> vel_w(static_cast<std::size_t>(m) * d);
    std::vector<double> coeff(static_cast<std::size_t>(n));

    ParticleFlowResult res;
    for (int step = 0; step < steps; ++step) {
        // (i) particle velocities: v_j = -grad_{u_j} R(f_m), assembled
        // particle-major from the per-sample mean-field coefficients.
        for (int i = 0; i < n; ++i) {
            const double f = mean_field_eval(a, w, m, d, act, data.X.data() + static_cast<std::size_t>(i) * d);
            coeff[static_cast<std::size_t>(i)] =
                nn::detail::tl_sample_coeff(f - data.y[static_cast<std::size_t>(i)], n, m, false);
        }
        for (int j = 0; j < m; ++j) {
            double va = 0.0;
            const double* wj = w.data() + static_cast<std::size_t>(j) * d;
            for (int k = 0; k < d; ++k) vel_w[static_cast<std::size_t>(j) * d + k] = 0.0;
            for (int i = 0; i < n; ++i) {
                const double* xi = data.X.data() + static_cast<std::size_t>(i) * d;
                const double s = dot(wj, xi, static_cast<std::size_t>(d));
                va += nn::detail::tl_grad_a_term(coeff[static_cast<std::size_t>(i)], act, s);
                for (int k = 0; k < d; ++k)
                    vel_w[static_cast<std::size_t>(j) * d + k] += nn::detail::tl_grad_w_term(
                        coeff[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)], act, s, xi[k]);
            }
            vel_a[static_cast<std::size_t>(j)] = va;
        }

        // (ii) reverse-mode gradient of the same risk.
        net.risk_grad(data.X, data.y, n, grad);

        // Euler step on the particles, gradient step on the net.
        for (int j = 0; j < m; ++j) a[static_cast<std::size_t>(j)] -= eta * vel_a[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < vel_w.size(); ++k) w[k] -= eta * vel_w[k];
        auto theta = net.params().data();
        for (std::size_t k = 0; k < grad.size(); ++k) theta[k] -= eta * grad[k];

        for (int j = 0; j < m; ++j)
            res.max_param_deviation = std::max(
                res.max_param_deviation, std::abs(a[static_cast<std::size_t>(j)] - net.a()[static_cast<std::size_t>(j)]));
        for (std::size_t k = 0; k < w.size(); ++k)
            res.max_param_deviation =
                std::max(res.max_param_deviation, std::abs(w[k] - net.w()[k]));
        ++res.steps_run;
    }
    res.final_risk = net.risk(data.X, data.y, n);
    return res;
}

}  // namespace mlnum::meanfield
