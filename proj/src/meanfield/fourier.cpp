#include "mlnum/meanfield/fourier.hpp"

#include <stdexcept>

#include "mlnum/core/gaussian.hpp"
#include "mlnum/core/philox.hpp"

namespace mlnum::meanfield {

FourierApproxResult fourier_feature_approx(
    const std::function<double(std::span<const double>)>& amplitude, int d, int m,
    std::uint64_t seed, std::uint64_t stream, const TargetFn& f_star, int test_points,
    McSampler frequency_dist, McSampler test_dist) {
    if (m < 1) throw std::invalid_argument("fourier_feature_approx: m >= 1 required");

    nn::ScaledTwoLayerNet net({d, m, nn::Activation::Cos, false});
    auto a = net.a();
    auto w = net.w();
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < d; ++k) {
            const std::uint64_t di =
                static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(k);
            w[static_cast<std::size_t>(j) * d + k] = frequency_dist == McSampler::Gaussian
                                                         ? standard_normal(seed, stream, di)
                                                         : standard_uniform(seed, stream, di);
        }
        a[static_cast<std::size_t>(j)] =
            amplitude(std::span<const double>(w).subspan(static_cast<std::size_t>(j) * d, static_cast<std::size_t>(d)));
    }

    const std::uint64_t test_stream = substream(stream, stream_id("fourier/test"));
    std::vector<double> x(static_cast<std::size_t>(d));
    double acc = 0.0;
    for (int i = 0; i < test_points; ++i) {
        for (int k = 0; k < d; ++k) {
            const std::uint64_t di =
                static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(k);
            x[static_cast<std::size_t>(k)] = test_dist == McSampler::Gaussian
                                                 ? standard_normal(seed, test_stream, di)
                                                 : standard_uniform(seed, test_stream, di);
        }
        const double e = net.forward(x) - f_star(x);
        acc += e * e;
    }

    FourierApproxResult res{std::move(net), acc / static_cast<double>(test_points)};
    return res;
}

}  // namespace mlnum::meanfield
