#include "mlnum/pmp/forward_backward.hpp"

#include <stdexcept>
#include <string>

#include "mlnum/core/compensated.hpp"

namespace mlnum::pmp {

double hamiltonian(std::span<const double> z, std::span<const double> p,
                   std::span<const double> a, std::span<const double> w, int M, int D,
                   nn::Activation act) {
    if (static_cast<int>(z.size()) != D || static_cast<int>(p.size()) != D)
        throw std::invalid_argument("hamiltonian: state/costate dimension mismatch");
    if (a.size() != static_cast<std::size_t>(M) * D || w.size() != a.size())
        throw std::invalid_argument("hamiltonian: particle block shape mismatch");
    NeumaierSum sum;
    for (int j = 0; j < M; ++j) {
        const double s = dot(w.data() + static_cast<std::size_t>(j) * D, z.data(), static_cast<std::size_t>(D));
        const double sig = nn::act(act, s);
        const double pa = dot(a.data() + static_cast<std::size_t>(j) * D, p.data(), static_cast<std::size_t>(D));
        sum.add(pa * sig);
    }
    return sum.value() / static_cast<double>(M);
}

void hamiltonian_grad_z(std::span<const double> z, std::span<const double> p,
                        std::span<const double> a, std::span<const double> w, int M, int D,
                        nn::Activation act, std::span<double> out) {
    for (double& v : out) v = 0.0;
    for (int j = 0; j < M; ++j) {
        const double* wj = w.data() + static_cast<std::size_t>(j) * D;
        const double s = dot(wj, z.data(), static_cast<std::size_t>(D));
        const double coef = nn::act_deriv(act, s) *
                            dot(a.data() + static_cast<std::size_t>(j) * D, p.data(), static_cast<std::size_t>(D)) /
                            static_cast<double>(M);
        for (int k = 0; k < D; ++k) out[static_cast<std::size_t>(k)] += coef * wj[k];
    }
}

void layer_drift(std::span<const double> z, std::span<const double> a,
                 std::span<const double> w, int M, int D, nn::Activation act,
                 std::span<double> out) {
    for (double& v : out) v = 0.0;
    for (int j = 0; j < M; ++j) {
        const double s = dot(w.data() + static_cast<std::size_t>(j) * D, z.data(), static_cast<std::size_t>(D));
        const double sig = nn::act(act, s) / static_cast<double>(M);
        const double* aj = a.data() + static_cast<std::size_t>(j) * D;
        for (int k = 0; k < D; ++k) out[static_cast<std::size_t>(k)] += sig * aj[k];
    }
}

void forward_backward(const nn::ScaledResNet& net, std::span<const double> x, double f_star,
                      ForwardBackwardCache& cache) {
    const auto& spec = net.spec();
    const int L = spec.L, M = spec.M, D = net.lifted_dim();
    const double LM = static_cast<double>(L) * static_cast<double>(M);

    nn::ScaledResNet::PathCache fwd;
    net.forward_cache(x, fwd);
    cache.z = std::move(fwd.z);
    cache.pre = std::move(fwd.pre);
    cache.f = fwd.f;
    cache.p.assign(static_cast<std::size_t>(L + 1) * D, 0.0);

    const auto alpha = net.params().view("alpha");
    const double coeff = -2.0 * (cache.f - f_star);
    double* pL = cache.p.data() + static_cast<std::size_t>(L) * D;
    for (int k = 0; k < D; ++k) pL[k] = coeff * alpha[static_cast<std::size_t>(k)];

    for (int l = L - 1; l >= 0; --l) {
        const auto a = net.params().view("l" + std::to_string(l) + "/a");
        const auto w = net.params().view("l" + std::to_string(l) + "/w");
        const double* pre = cache.pre.data() + static_cast<std::size_t>(l) * M;
        const double* pn = cache.p.data() + static_cast<std::size_t>(l + 1) * D;
        double* pl = cache.p.data() + static_cast<std::size_t>(l) * D;
        for (int k = 0; k < D; ++k) pl[k] = pn[k];
        for (int j = 0; j < M; ++j) {
            const double* wj = w.data() + static_cast<std::size_t>(j) * D;
            const double coef =
                nn::act_deriv(spec.act, pre[j]) *
                dot(a.data() + static_cast<std::size_t>(j) * D, pn, static_cast<std::size_t>(D)) / LM;
            for (int k = 0; k < D; ++k) pl[k] += coef * wj[k];
        }
    }
}

void pmp_gradient(const nn::ScaledResNet& net, std::span<const double> X,
                  std::span<const double> y, int n, std::span<double> grad) {
    if (grad.size() != net.params().size())
        throw std::invalid_argument("pmp_gradient: gradient length mismatch");
    const auto& spec = net.spec();
    const int L = spec.L, M = spec.M, D = net.lifted_dim(), d = spec.d;
    const double inv_LMn =
        1.0 / (static_cast<double>(L) * static_cast<double>(M) * static_cast<double>(n));
    for (double& g : grad) g = 0.0;

    ForwardBackwardCache cache;
    for (int i = 0; i < n; ++i) {
        forward_backward(net, X.subspan(static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)),
                         y[static_cast<std::size_t>(i)], cache);
        for (int l = 0; l < L; ++l) {
            const auto a = net.params().view("l" + std::to_string(l) + "/a");
            const double* zl = cache.z.data() + static_cast<std::size_t>(l) * D;
            const double* pre = cache.pre.data() + static_cast<std::size_t>(l) * M;
            const double* pn = cache.p.data() + static_cast<std::size_t>(l + 1) * D;
            double* ga = grad.data() + net.slice_a(l).offset;
            double* gw = grad.data() + net.slice_w(l).offset;
            for (int j = 0; j < M; ++j) {
                const double sig_term = -inv_LMn * nn::act(spec.act, pre[j]);
                const double w_coef =
                    -inv_LMn * nn::act_deriv(spec.act, pre[j]) *
                    dot(a.data() + static_cast<std::size_t>(j) * D, pn, static_cast<std::size_t>(D));
                double* gaj = ga + static_cast<std::size_t>(j) * D;
                double* gwj = gw + static_cast<std::size_t>(j) * D;
                for (int k = 0; k < D; ++k) {
                    gaj[k] += sig_term * pn[k];
                    gwj[k] += w_coef * zl[k];
                }
            }
        }
    }
}

}  // namespace mlnum::pmp
