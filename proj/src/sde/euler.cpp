#include "mlnum/sde/euler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlnum::sde {

StatePathBatch euler_maruyama(const Dynamics& dyn, const TimeGrid& grid,
                              std::span<const double> xi, const BrownianBatch& dw, Exec exec) {
    const int d = dw.d, B = dw.B, N = dw.N;
    if (static_cast<int>(xi.size()) != d)
        throw std::invalid_argument("euler_maruyama: initial point dimension mismatch");
    if (N != grid.N) throw std::invalid_argument("euler_maruyama: grid/batch step mismatch");

    StatePathBatch out;
    out.B = B;
    out.N = N;
    out.d = d;
    out.x.resize(static_cast<std::size_t>(B) * (N + 1) * d);

    const double dt = grid.dt();
    for_chunks(static_cast<std::size_t>(B), kDefaultChunk, exec,
               [&](std::size_t, std::size_t b_begin, std::size_t b_end) {
                   std::vector<double> mu(dyn.drift ? d : 0);
                   std::vector<double> sig(dyn.sigma_is_scalar ? 0 : d);
                   for (std::size_t b = b_begin; b < b_end; ++b) {
                       double* x0 = out.at(static_cast<int>(b), 0);
                       for (int k = 0; k < d; ++k) x0[k] = xi[k];
                       for (int n = 0; n < N; ++n) {
                           const double* xn = out.at(static_cast<int>(b), n);
                           double* xn1 = out.at(static_cast<int>(b), n + 1);
                           const double* w = dw.at(static_cast<int>(b), n);
                           const double t = grid.t(n);
                           if (dyn.sigma_is_scalar) {
                               const double s = dyn.sigma_scalar;
                               for (int k = 0; k < d; ++k) xn1[k] = xn[k] + s * w[k];
                           } else {
                               dyn.sigma_apply(t, std::span<const double>(xn, d),
                                               std::span<const double>(w, d),
                                               std::span<double>(sig));
                               for (int k = 0; k < d; ++k) xn1[k] = xn[k] + sig[k];
                           }
                           if (dyn.drift) {
                               dyn.drift(t, std::span<const double>(xn, d), std::span<double>(mu));
                               for (int k = 0; k < d; ++k) xn1[k] += mu[k] * dt;
                           }
                       }
                   }
               });

    // Finiteness scan after the fill keeps the parallel kernel branch-free and
    // the reported index deterministic.
    for (int b = 0; b < B; ++b)
        for (int n = 1; n <= N; ++n) {
            const double* xn = out.at(b, n);
            for (int k = 0; k < d; ++k)
                if (!std::isfinite(xn[k]))
                    throw NonFiniteState(b, n,
                                         "euler_maruyama: non-finite state at sample " +
                                             std::to_string(b) + ", step " + std::to_string(n));
        }
    return out;
}

void controlled_step(std::span<const double> x, std::span<const double> drift, double dt,
                     std::span<const double> noise, std::span<double> out) {
    if (drift.size() != x.size() || noise.size() != x.size() || out.size() != x.size())
        throw std::invalid_argument("controlled_step: dimension mismatch");
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] + drift[k] * dt + noise[k];
}

void lqg_drift(double lambda, std::span<const double> m, std::span<double> out) {
    if (out.size() != m.size()) throw std::invalid_argument("lqg_drift: dimension mismatch");
    const double c = 2.0 * std::sqrt(lambda);
    for (std::size_t k = 0; k < m.size(); ++k) out[k] = c * m[k];
}

}  // namespace mlnum::sde
