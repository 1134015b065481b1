#include "mlnum/meanfield/rademacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mlnum/core/gaussian.hpp"
#include "mlnum/core/philox.hpp"

namespace mlnum::meanfield {

namespace {

// Euclidean projection onto the l1 ball of radius 1 (Duchi et al. style,
// sort-based).
void project_l1_ball(std::vector<double>& w) {
    double l1 = 0.0;
    for (double v : w) l1 += std::abs(v);
    if (l1 <= 1.0) return;
    std::vector<double> mag(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) mag[i] = std::abs(w[i]);
    std::sort(mag.begin(), mag.end(), std::greater<double>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        cum += mag[i];
        const double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (t >= (i + 1 < mag.size() ? mag[i + 1] : 0.0)) {
            theta = t;
            break;
        }
    }
    for (double& v : w)
        v = v > 0 ? std::max(0.0, v - theta) : -std::max(0.0, -v - theta);
}

double sign_sum(std::span<const double> X, int n, int d, const std::vector<double>& w,
                const std::vector<double>& xi) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double dot = 0.0;
        for (int k = 0; k < d; ++k) dot += w[static_cast<std::size_t>(k)] * X[static_cast<std::size_t>(i) * d + k];
        s += xi[static_cast<std::size_t>(i)] * std::max(0.0, dot);
    }
    return s;
}

}  // namespace

RademacherResult rademacher_barron_ball(std::span<const double> X, int n, int d, double Q,
                                        const RademacherOptions& opt, std::uint64_t seed) {
    if (opt.trials < 1) throw std::invalid_argument("rademacher: trials >= 1 required");
    if (X.size() != static_cast<std::size_t>(n) * d)
        throw std::invalid_argument("rademacher: dataset shape mismatch");

    RademacherResult res;
    res.bound = 2.0 * Q * std::sqrt(2.0 * std::log(2.0 * d) / static_cast<double>(n));

    RngStream rng(seed, stream_id("rademacher"));
    std::vector<double> xi(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(d)), grad(static_cast<std::size_t>(d));
    double mean_sup = 0.0;

    for (int trial = 0; trial < opt.trials; ++trial) {
        for (double& s : xi) s = rng.uniform() < 0.5 ? -1.0 : 1.0;
        double best = 0.0;  // f = 0 is always in the ball
        for (int start = 0; start < opt.starts; ++start) {
            double l1 = 0.0;
            for (double& v : w) {
                v = rng.uniform(-1.0, 1.0);
                l1 += std::abs(v);
            }
            for (double& v : w) v /= std::max(l1, 1e-12);
            for (int step = 0; step < opt.steps; ++step) {
                const double val = sign_sum(X, n, d, w, xi);
                const double dir = val >= 0.0 ? 1.0 : -1.0;
                for (double& g : grad) g = 0.0;
                for (int i = 0; i < n; ++i) {
                    double dot = 0.0;
                    for (int k = 0; k < d; ++k)
                        dot += w[static_cast<std::size_t>(k)] * X[static_cast<std::size_t>(i) * d + k];
                    if (dot > 0.0) {
                        const double c = dir * xi[static_cast<std::size_t>(i)];
                        for (int k = 0; k < d; ++k)
                            grad[static_cast<std::size_t>(k)] += c * X[static_cast<std::size_t>(i) * d + k];
                    }
                }
                for (int k = 0; k < d; ++k)
                    w[static_cast<std::size_t>(k)] += opt.step_size / static_cast<double>(n) * grad[static_cast<std::size_t>(k)];
                project_l1_ball(w);
                res.budget_used += 1;
            }
            // objective is 1-homogeneous in w: push to the sphere
            double l1b = 0.0;
            for (double v : w) l1b += std::abs(v);
            if (l1b > 1e-12)
                for (double& v : w) v /= l1b;
            best = std::max(best, std::abs(sign_sum(X, n, d, w, xi)));
        }
        mean_sup += Q * best;
    }
    res.estimate = mean_sup / static_cast<double>(opt.trials) / static_cast<double>(n);
    return res;
}

double rademacher_finite(const std::vector<TargetFn>& fns, std::span<const double> X, int n,
                         int d, int trials, std::uint64_t seed) {
    if (fns.empty()) throw std::invalid_argument("rademacher_finite: empty class");
    RngStream rng(seed, stream_id("rademacher/finite"));
    // precompute h(x_i) per hypothesis
    std::vector<std::vector<double>> vals(fns.size(), std::vector<double>(static_cast<std::size_t>(n)));
    for (std::size_t f = 0; f < fns.size(); ++f)
        for (int i = 0; i < n; ++i)
            vals[f][static_cast<std::size_t>(i)] =
                fns[f](X.subspan(static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)));

    double mean_sup = 0.0;
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (int trial = 0; trial < trials; ++trial) {
        for (double& s : xi) s = rng.uniform() < 0.5 ? -1.0 : 1.0;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& v : vals) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += xi[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
            best = std::max(best, s);
        }
        mean_sup += best;
    }
    return mean_sup / static_cast<double>(trials) / static_cast<double>(n);
}

}  // namespace mlnum::meanfield
