#include "mlnum/bsde/hopf_cole.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mlnum/core/gaussian.hpp"

namespace mlnum::bsde {

namespace {
constexpr std::size_t kMcChunk = 8192;
}

McEstimate hopf_cole_reference(int d, double lambda,
                               const std::function<double(std::span<const double>)>& g,
                               double T, long mc_samples, std::uint64_t seed,
                               std::uint64_t stream, std::span<const double> x0,
                               bool max_shift, Exec exec) {
    if (!(lambda > 0.0)) throw std::invalid_argument("hopf_cole_reference: lambda > 0 required");
    if (mc_samples < 1) throw std::invalid_argument("hopf_cole_reference: mc_samples >= 1");
    if (static_cast<int>(x0.size()) != d)
        throw std::invalid_argument("hopf_cole_reference: x0 dimension mismatch");

    const double scale = std::sqrt(2.0 * T);
    const std::size_t n = static_cast<std::size_t>(mc_samples);
    const std::size_t nc = chunk_count(n, kMcChunk);
    std::vector<double> cmax(nc), cs1(nc), cs2(nc);

    for_chunks(n, kMcChunk, exec, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::vector<double> x(static_cast<std::size_t>(d));
        std::vector<double> ys(e - b);
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t s = b; s < e; ++s) {
            for (int k = 0; k < d; ++k)
                x[static_cast<std::size_t>(k)] =
                    x0[static_cast<std::size_t>(k)] +
                    scale * standard_normal(seed, stream,
                                            s * static_cast<std::size_t>(d) + static_cast<std::size_t>(k));
            const double y = -lambda * g(x);
            ys[s - b] = y;
            if (y > m) m = y;
        }
        if (!max_shift) m = 0.0;
        double s1 = 0.0, s2 = 0.0;
        for (double y : ys) {
            const double ey = std::exp(y - m);
            s1 += ey;
            s2 += ey * ey;
        }
        cmax[c] = m;
        cs1[c] = s1;
        cs2[c] = s2;
    });

    double M = cmax[0];
    for (double m : cmax) M = std::max(M, m);
    double S1 = 0.0, S2 = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
        const double r = std::exp(cmax[c] - M);
        S1 += r * cs1[c];
        S2 += (r * r) * cs2[c];
    }

    const double nn = static_cast<double>(n);
    const double vbar = S1 / nn;  // mean of exp(y - M)
    const double var = std::max(0.0, S2 / nn - vbar * vbar);
    McEstimate out;
    out.samples = mc_samples;
    out.value = -(M + std::log(vbar)) / lambda;
    out.std_error = std::sqrt(var / nn) / (lambda * vbar);
    return out;
}

McEstimate mc_terminal_expectation(int d, const std::function<double(std::span<const double>)>& g,
                                   double T, double sigma_scalar, long mc_samples,
                                   std::uint64_t seed, std::uint64_t stream,
                                   std::span<const double> x0, Exec exec) {
    if (mc_samples < 1) throw std::invalid_argument("mc_terminal_expectation: mc_samples >= 1");
    const double scale = sigma_scalar * std::sqrt(T);
    const std::size_t n = static_cast<std::size_t>(mc_samples);
    const std::size_t nc = chunk_count(n, kMcChunk);
    std::vector<double> cs1(nc), cs2(nc);

    for_chunks(n, kMcChunk, exec, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::vector<double> x(static_cast<std::size_t>(d));
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t s = b; s < e; ++s) {
            for (int k = 0; k < d; ++k)
                x[static_cast<std::size_t>(k)] =
                    x0[static_cast<std::size_t>(k)] +
                    scale * standard_normal(seed, stream,
                                            s * static_cast<std::size_t>(d) + static_cast<std::size_t>(k));
            const double v = g(x);
            s1 += v;
            s2 += v * v;
        }
        cs1[c] = s1;
        cs2[c] = s2;
    });

    double S1 = 0.0, S2 = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
        S1 += cs1[c];
        S2 += cs2[c];
    }
    const double nn = static_cast<double>(n);
    McEstimate out;
    out.samples = mc_samples;
    out.value = S1 / nn;
    out.std_error = std::sqrt(std::max(0.0, S2 / nn - out.value * out.value) / nn);
    return out;
}

}  // namespace mlnum::bsde
