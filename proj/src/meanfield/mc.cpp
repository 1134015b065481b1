#include "mlnum/meanfield/mc.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlnum/core/gaussian.hpp"
#include "mlnum/core/philox.hpp"

namespace mlnum::meanfield {

namespace {
void draw_point(McSampler kind, std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                int d, std::span<double> out) {
    for (int k = 0; k < d; ++k) {
        const std::uint64_t di = index * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(k);
        out[static_cast<std::size_t>(k)] = kind == McSampler::UniformCube
                                               ? standard_uniform(seed, stream, di)
                                               : standard_normal(seed, stream, di);
    }
}
}  // namespace

SupervisedDataset sample_dataset(const TargetFn& target, int n, int d, std::uint64_t seed,
                                 std::uint64_t stream) {
    if (n < 1 || d < 1) throw std::invalid_argument("sample_dataset: n, d >= 1 required");
    SupervisedDataset data;
    data.d = d;
    data.n = n;
    data.X.resize(static_cast<std::size_t>(n) * d);
    data.y.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        draw_point(McSampler::UniformCube, seed, stream, static_cast<std::uint64_t>(i), d,
                   std::span<double>(data.X).subspan(static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)));
        data.y[static_cast<std::size_t>(i)] =
            target(std::span<const double>(data.X).subspan(static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)));
    }
    return data;
}

double mc_integrate(const TargetFn& g, int d, long m, McSampler kind, std::uint64_t seed,
                    std::uint64_t stream, Exec exec) {
    if (m < 1) throw std::invalid_argument("mc_integrate: m >= 1 required");
    const std::size_t n = static_cast<std::size_t>(m);
    const double total = chunked_sum(n, 4096, exec, [&](std::size_t i) {
        double x[64];
        std::vector<double> big;
        std::span<double> xs;
        if (d <= 64) {
            xs = std::span<double>(x, static_cast<std::size_t>(d));
        } else {
            big.resize(static_cast<std::size_t>(d));
            xs = big;
        }
        draw_point(kind, seed, stream, static_cast<std::uint64_t>(i), d, xs);
        return g(xs);
    });
    return total / static_cast<double>(m);
}

double replicated_mse(const TargetFn& g, double true_value, int d, long m, int reps,
                      McSampler kind, std::uint64_t seed, Exec exec) {
    if (reps < 1) throw std::invalid_argument("replicated_mse: reps >= 1 required");
    const std::uint64_t base = stream_id("mc/replication");
    const std::size_t R = static_cast<std::size_t>(reps);
    const std::size_t nc = chunk_count(R, kDefaultChunk);
    std::vector<double> partial(nc, 0.0);
    for_chunks(R, kDefaultChunk, exec, [&](std::size_t c, std::size_t b, std::size_t e) {
        double acc = 0.0;
        for (std::size_t r = b; r < e; ++r) {
            const double est = mc_integrate(g, d, m, kind, seed,
                                            substream(base, static_cast<std::uint64_t>(r)),
                                            Exec::Serial);
            const double err = est - true_value;
            acc += err * err;
        }
        partial[c] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(reps);
}

SlopeFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("fit_loglog: need at least two points");
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_loglog: inputs must be positive (degenerate fit)");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_loglog: degenerate fit (flat ladder)");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

}  // namespace mlnum::meanfield
