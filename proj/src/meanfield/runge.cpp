#include "mlnum/meanfield/runge.hpp"

#include <cmath>
#include <stdexcept>

namespace mlnum::meanfield {

double runge_fn(double x) { return 1.0 / (1.0 + 25.0 * x * x); }

double max_interp_error_equidistant(const std::function<double(double)>& f, int degree,
                                    int grid_points) {
    if (degree < 2) throw std::invalid_argument("interpolation degree must be >= 2");
    const int n = degree;
    std::vector<double> nodes(static_cast<std::size_t>(n) + 1), fv(static_cast<std::size_t>(n) + 1),
        wgt(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        nodes[static_cast<std::size_t>(j)] = -1.0 + 2.0 * j / static_cast<double>(n);
        fv[static_cast<std::size_t>(j)] = f(nodes[static_cast<std::size_t>(j)]);
    }
    // barycentric weights for equidistant nodes: (-1)^j C(n, j)
    wgt[0] = 1.0;
    for (int j = 1; j <= n; ++j)
        wgt[static_cast<std::size_t>(j)] =
            -wgt[static_cast<std::size_t>(j - 1)] * static_cast<double>(n - j + 1) / static_cast<double>(j);

    double max_err = 0.0;
    for (int g = 0; g < grid_points; ++g) {
        const double x = -1.0 + 2.0 * g / static_cast<double>(grid_points - 1);
        double num = 0.0, den = 0.0;
        bool at_node = false;
        double node_val = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double diff = x - nodes[static_cast<std::size_t>(j)];
            if (std::abs(diff) < 1e-14) {
                at_node = true;
                node_val = fv[static_cast<std::size_t>(j)];
                break;
            }
            const double q = wgt[static_cast<std::size_t>(j)] / diff;
            num += q * fv[static_cast<std::size_t>(j)];
            den += q;
        }
        const double p = at_node ? node_val : num / den;
        max_err = std::max(max_err, std::abs(p - f(x)));
    }
    return max_err;
}

std::vector<double> runge_demo(std::span<const int> degrees) {
    std::vector<double> errs;
    errs.reserve(degrees.size());
    for (int deg : degrees) errs.push_back(max_interp_error_equidistant(runge_fn, deg));
    return errs;
}

}  // namespace mlnum::meanfield
