#include "mlnum/nn/resnet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mlnum/core/compensated.hpp"
#include "mlnum/core/gaussian.hpp"

namespace mlnum::nn {

namespace {
std::string layer_name(int l, const char* tensor) {
    return "l" + std::to_string(l) + "/" + tensor;
}
}  // namespace

ScaledResNet::ScaledResNet(ResNetSpec spec) : spec_(spec), D_(spec.D > 0 ? spec.D : spec.d + 1) {
    if (spec_.d < 1 || spec_.L < 1 || spec_.M < 1)
        throw std::invalid_argument("resnet requires d, L, M >= 1");
    params_.add("V", static_cast<std::size_t>(D_) * (spec_.d + 1));
    params_.add("alpha", static_cast<std::size_t>(D_));
    for (int l = 0; l < spec_.L; ++l) {
        params_.add(layer_name(l, "a"), static_cast<std::size_t>(spec_.M) * D_);
        params_.add(layer_name(l, "w"), static_cast<std::size_t>(spec_.M) * D_);
    }
}

ParamStore::Slice ScaledResNet::slice_a(int layer) const {
    return params_.slice(layer_name(layer, "a"));
}
ParamStore::Slice ScaledResNet::slice_w(int layer) const {
    return params_.slice(layer_name(layer, "w"));
}

void ScaledResNet::set_identity_lift() {
    if (D_ != spec_.d + 1)
        throw std::invalid_argument("identity lift requires lifted dim d+1");
    auto V = params_.view("V");
    for (double& v : V) v = 0.0;
    for (int k = 0; k < D_; ++k) V[static_cast<std::size_t>(k) * (spec_.d + 1) + k] = 1.0;
}

void ScaledResNet::set_alpha_ones() {
    for (double& v : params_.view("alpha")) v = 1.0;
}

void ScaledResNet::init_particles_uniform(std::uint64_t seed, std::uint64_t stream, double lo,
                                          double hi) {
    RngStream rng(seed, stream);
    for (int l = 0; l < spec_.L; ++l) {
        for (double& v : params_.view(layer_name(l, "a"))) v = rng.uniform(lo, hi);
        for (double& v : params_.view(layer_name(l, "w"))) v = rng.uniform(lo, hi);
    }
}

void ScaledResNet::forward_cache(std::span<const double> x, PathCache& cache) const {
    if (static_cast<int>(x.size()) != spec_.d)
        throw std::invalid_argument("resnet forward: input dimension mismatch");
    const int d = spec_.d, L = spec_.L, M = spec_.M, D = D_;
    const double LM = static_cast<double>(L) * static_cast<double>(M);

    cache.z.assign(static_cast<std::size_t>(L + 1) * D, 0.0);
    cache.pre.assign(static_cast<std::size_t>(L) * M, 0.0);

    std::vector<double> xt(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k < d; ++k) xt[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)];
    xt[static_cast<std::size_t>(d)] = 1.0;

    const auto V = params_.view("V");
    double* z0 = cache.z.data();
    for (int k = 0; k < D; ++k)
        z0[k] = dot(V.data() + static_cast<std::size_t>(k) * (d + 1), xt.data(),
                    static_cast<std::size_t>(d + 1));

    for (int l = 0; l < L; ++l) {
        const auto av = params_.view(layer_name(l, "a"));
        const auto wv = params_.view(layer_name(l, "w"));
        const double* zl = cache.z.data() + static_cast<std::size_t>(l) * D;
        double* zn = cache.z.data() + static_cast<std::size_t>(l + 1) * D;
        double* pre = cache.pre.data() + static_cast<std::size_t>(l) * M;
        for (int j = 0; j < M; ++j)
            pre[j] = dot(wv.data() + static_cast<std::size_t>(j) * D, zl,
                         static_cast<std::size_t>(D));
        for (int k = 0; k < D; ++k) {
            NeumaierSum sum;
            for (int j = 0; j < M; ++j)
                sum.add(av[static_cast<std::size_t>(j) * D + k] * act(spec_.act, pre[j]));
            zn[k] = zl[k] + sum.value() / LM;
        }
    }
    cache.f = dot(params_.view("alpha").data(), cache.z.data() + static_cast<std::size_t>(L) * D,
                  static_cast<std::size_t>(D));
}

double ScaledResNet::forward(std::span<const double> x) const {
    PathCache cache;
    forward_cache(x, cache);
    return cache.f;
}

std::vector<double> ScaledResNet::forward_path(std::span<const double> x) const {
    PathCache cache;
    forward_cache(x, cache);
    return std::move(cache.z);
}

void ScaledResNet::accumulate_backward(std::span<const double> x, const PathCache& cache,
                                       double coeff, std::span<double> grad) const {
    const int d = spec_.d, L = spec_.L, M = spec_.M, D = D_;
    const double LM = static_cast<double>(L) * static_cast<double>(M);
    const auto alpha = params_.view("alpha");

    if (spec_.train_alpha) {
        double* ga = grad.data() + params_.slice("alpha").offset;
        const double* zL = cache.z.data() + static_cast<std::size_t>(L) * D;
        for (int k = 0; k < D; ++k) ga[k] += coeff * zL[k];
    }

    // v = adjoint of z_l, initialized at l = L.
    std::vector<double> v(static_cast<std::size_t>(D));
    for (int k = 0; k < D; ++k) v[static_cast<std::size_t>(k)] = coeff * alpha[static_cast<std::size_t>(k)];

    std::vector<double> coefs(static_cast<std::size_t>(M));
    for (int l = L - 1; l >= 0; --l) {
        const auto av = params_.view(layer_name(l, "a"));
        const auto wv = params_.view(layer_name(l, "w"));
        const double* zl = cache.z.data() + static_cast<std::size_t>(l) * D;
        const double* pre = cache.pre.data() + static_cast<std::size_t>(l) * M;
        double* ga = grad.data() + slice_a(l).offset;
        double* gw = grad.data() + slice_w(l).offset;

        for (int j = 0; j < M; ++j) {
            const double* aj = av.data() + static_cast<std::size_t>(j) * D;
            const double sig = act(spec_.act, pre[j]);
            const double dsig = act_deriv(spec_.act, pre[j]);
            const double adotv = dot(aj, v.data(), static_cast<std::size_t>(D));
            const double sig_scaled = sig / LM;
            const double coef = (adotv * dsig) / LM;
            coefs[static_cast<std::size_t>(j)] = coef;
            double* gaj = ga + static_cast<std::size_t>(j) * D;
            double* gwj = gw + static_cast<std::size_t>(j) * D;
            for (int k = 0; k < D; ++k) {
                gaj[k] += sig_scaled * v[static_cast<std::size_t>(k)];
                gwj[k] += coef * zl[k];
            }
        }
        for (int j = 0; j < M; ++j) {
            const double* wj = wv.data() + static_cast<std::size_t>(j) * D;
            const double coef = coefs[static_cast<std::size_t>(j)];
            for (int k = 0; k < D; ++k) v[static_cast<std::size_t>(k)] += coef * wj[k];
        }
    }

    if (spec_.train_lift) {
        double* gV = grad.data() + params_.slice("V").offset;
        for (int k = 0; k < D; ++k) {
            double* row = gV + static_cast<std::size_t>(k) * (d + 1);
            const double vk = v[static_cast<std::size_t>(k)];
            for (int c = 0; c < d; ++c) row[c] += vk * x[static_cast<std::size_t>(c)];
            row[d] += vk;
        }
    }
}

double ScaledResNet::risk(std::span<const double> X, std::span<const double> y, int n) const {
    if (n < 1) throw std::invalid_argument("risk: empty batch");
    double acc = 0.0;
    PathCache cache;
    for (int i = 0; i < n; ++i) {
        forward_cache(X.subspan(static_cast<std::size_t>(i) * spec_.d, spec_.d), cache);
        const double e = cache.f - y[static_cast<std::size_t>(i)];
        acc += e * e;
    }
    return acc / static_cast<double>(n);
}

void ScaledResNet::risk_grad(std::span<const double> X, std::span<const double> y, int n,
                             std::span<double> grad) const {
    if (grad.size() != params_.size())
        throw std::invalid_argument("risk_grad: gradient length mismatch");
    for (double& g : grad) g = 0.0;
    PathCache cache;
    for (int i = 0; i < n; ++i) {
        const auto xi = X.subspan(static_cast<std::size_t>(i) * spec_.d, spec_.d);
        forward_cache(xi, cache);
        const double coeff = (2.0 * (cache.f - y[static_cast<std::size_t>(i)])) / static_cast<double>(n);
        accumulate_backward(xi, cache, coeff, grad);
    }
}

GradTape ScaledResNet::risk_tape(std::span<const double> X, std::span<const double> y,
                                 int n) const {
    GradTape tape(params_.size(), risk(X, y, n));
    std::vector<double> Xc(X.begin(), X.end());
    std::vector<double> yc(y.begin(), y.end());
    tape.set_backward([this, Xc = std::move(Xc), yc = std::move(yc), n](std::vector<double>& g) {
        risk_grad(Xc, yc, n, g);
    });
    return tape;
}

GradTape ScaledResNet::output_tape(std::span<const double> x) const {
    PathCache cache;
    forward_cache(x, cache);
    GradTape tape(params_.size(), cache.f);
    std::vector<double> xc(x.begin(), x.end());
    tape.set_backward([this, xc = std::move(xc)](std::vector<double>& g) {
        PathCache c2;
        forward_cache(xc, c2);
        accumulate_backward(xc, c2, 1.0, g);
    });
    return tape;
}

}  // namespace mlnum::nn
