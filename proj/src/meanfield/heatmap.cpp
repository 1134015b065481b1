#include "mlnum/meanfield/heatmap.hpp"

#include <cmath>
#include <limits>

#include "mlnum/core/gaussian.hpp"
#include "mlnum/core/philox.hpp"
#include "mlnum/meanfield/dataset.hpp"
#include "mlnum/nn/two_layer.hpp"

namespace mlnum::meanfield {

namespace {
double single_neuron(std::span<const double> x) { return std::max(0.0, x[0]); }
}  // namespace

std::vector<HeatmapCell> heatmap_experiment(const HeatmapConfig& cfg, bool scaled, Exec exec) {
    if (cfg.ms.empty() || cfg.ns.empty() || cfg.seeds.empty())
        throw std::invalid_argument("heatmap: grids and seeds must be non-empty");

    std::vector<HeatmapCell> cells;
    for (int m : cfg.ms)
        for (int n : cfg.ns)
            for (std::uint64_t seed : cfg.seeds) cells.push_back({m, n, scaled, seed, 0.0, false});

    // Shared fresh test set for the population-risk estimate.
    std::vector<double> test_X(static_cast<std::size_t>(cfg.test_points) * cfg.d);
    std::vector<double> test_y(static_cast<std::size_t>(cfg.test_points));
    const std::uint64_t test_stream = stream_id("heatmap/test");
    for (std::size_t i = 0; i < test_X.size(); ++i)
        test_X[i] = standard_uniform(9001, test_stream, static_cast<std::uint64_t>(i));
    for (int i = 0; i < cfg.test_points; ++i)
        test_y[static_cast<std::size_t>(i)] = single_neuron(
            std::span<const double>(test_X).subspan(static_cast<std::size_t>(i) * cfg.d, static_cast<std::size_t>(cfg.d)));

    for_chunks(cells.size(), 1, exec, [&](std::size_t ci, std::size_t, std::size_t) {
        HeatmapCell& cell = cells[ci];
        auto data = sample_dataset(single_neuron, cell.n, cfg.d, cell.seed,
                                   stream_id("heatmap/data"));
        nn::ScaledTwoLayerNet net({cfg.d, cell.m, nn::Activation::Relu, !scaled});
        net.init_uniform(cell.seed, stream_id("heatmap/init"), cfg.init_lo, cfg.init_hi,
                         cfg.init_lo, cfg.init_hi);

        auto opt = nn::OptimizerState::adam(cfg.eta);
        std::vector<double> grad(net.params().size());
        bool diverged = false;
        for (int step = 0; step < cfg.steps; ++step) {
            net.risk_grad(data.X, data.y, data.n, grad);
            if (!opt.apply(net.params(), grad)) {
                diverged = true;
                break;
            }
        }
        if (!diverged) {
            const double err = net.risk(test_X, test_y, cfg.test_points);
            if (std::isfinite(err)) {
                cell.test_error = err;
            } else {
                diverged = true;
            }
        }
        if (diverged) {
            cell.diverged = true;
            cell.test_error = std::numeric_limits<double>::infinity();
        }
    });
    return cells;
}

}  // namespace mlnum::meanfield
