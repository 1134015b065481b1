#include "mlnum/meanfield/barron.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "mlnum/core/philox.hpp"

namespace mlnum::meanfield {

BarronTarget barron_relu_atoms(int d, int K, std::uint64_t seed) {
    if (K < 1) throw std::invalid_argument("barron_relu_atoms: K >= 1");
    auto atoms = std::make_shared<std::vector<double>>();  // K x (1 + d): a then w
    RngStream rng(seed, stream_id("barron/atoms"));
    atoms->resize(static_cast<std::size_t>(K) * (1 + d));
    for (int k = 0; k < K; ++k) {
        (*atoms)[static_cast<std::size_t>(k) * (1 + d)] = rng.uniform(-2.0, 2.0);
        for (int j = 0; j < d; ++j)
            (*atoms)[static_cast<std::size_t>(k) * (1 + d) + 1 + j] = rng.uniform(-1.0, 1.0);
    }
    BarronTarget t;
    t.name = "relu_atoms";
    t.d = d;
    t.act = nn::Activation::Relu;
    t.sample_atom = [atoms, K, d](RngStream& r, double& a, std::span<double> w) {
        const auto k = static_cast<std::size_t>(r.uniform_index(static_cast<std::uint64_t>(K)));
        a = (*atoms)[k * (1 + d)];
        for (int j = 0; j < d; ++j) w[static_cast<std::size_t>(j)] = (*atoms)[k * (1 + d) + 1 + j];
    };
    t.f_star = [atoms, K, d](std::span<const double> x) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
            double dot = 0.0;
            for (int j = 0; j < d; ++j)
                dot += (*atoms)[static_cast<std::size_t>(k) * (1 + d) + 1 + j] * x[static_cast<std::size_t>(j)];
            s += (*atoms)[static_cast<std::size_t>(k) * (1 + d)] * std::max(0.0, dot);
        }
        return s / static_cast<double>(K);
    };
    return t;
}

BarronTarget barron_relu_gaussian(int d) {
    BarronTarget t;
    t.name = "relu_gaussian";
    t.d = d;
    t.act = nn::Activation::Relu;
    t.sample_atom = [](RngStream& r, double& a, std::span<double> w) {
        a = 1.0;
        for (double& v : w) v = r.normal();
    };
    // E_w[relu(w . x)] = |x| E[relu(Z)] = |x| / sqrt(2 pi)
    t.f_star = [](std::span<const double> x) {
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        return std::sqrt(n2) / std::sqrt(2.0 * 3.14159265358979323846);
    };
    return t;
}

BarronTarget barron_cos_gaussian(int d) {
    BarronTarget t;
    t.name = "cos_gaussian";
    t.d = d;
    t.act = nn::Activation::Cos;
    t.sample_atom = [](RngStream& r, double& a, std::span<double> w) {
        a = 1.0;
        for (double& v : w) v = r.normal();
    };
    // E_w[cos(w . x)] = exp(-|x|^2 / 2), the gaussian characteristic function
    t.f_star = [](std::span<const double> x) {
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        return std::exp(-0.5 * n2);
    };
    return t;
}

BarronTarget barron_point_mass(int d) {
    BarronTarget t;
    t.name = "point_mass";
    t.d = d;
    t.act = nn::Activation::Relu;
    t.sample_atom = [d](RngStream&, double& a, std::span<double> w) {
        a = 1.5;
        for (int j = 0; j < d; ++j) w[static_cast<std::size_t>(j)] = (j == 0) ? 1.0 : 0.0;
    };
    t.f_star = [](std::span<const double> x) { return 1.5 * std::max(0.0, x[0]); };
    return t;
}

nn::ScaledTwoLayerNet sample_barron_network(const BarronTarget& target, int m,
                                            std::uint64_t seed, std::uint64_t stream) {
    nn::ScaledTwoLayerNet net({target.d, m, target.act, false});
    RngStream rng(seed, stream);
    auto a = net.a();
    auto w = net.w();
    for (int j = 0; j < m; ++j) {
        double aj = 0.0;
        target.sample_atom(rng, aj,
                           w.subspan(static_cast<std::size_t>(j) * target.d, static_cast<std::size_t>(target.d)));
        a[static_cast<std::size_t>(j)] = aj;
    }
    return net;
}

double l2_error(const nn::ScaledTwoLayerNet& net, const TargetFn& f_star,
                std::span<const double> test_X, int test_n) {
    const int d = net.spec().d;
    double acc = 0.0;
    for (int i = 0; i < test_n; ++i) {
        const auto x = test_X.subspan(static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d));
        const double e = net.forward(x) - f_star(x);
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(test_n));
}

RateStudyResult barron_rate_study(const BarronTarget& target, std::span<const int> m_ladder,
                                  int trials, int test_points, std::uint64_t seed, Exec exec) {
    if (m_ladder.size() < 4)
        throw std::invalid_argument("barron_rate_study: ladder needs at least 4 rungs");
    if (trials < 1) throw std::invalid_argument("barron_rate_study: trials >= 1");

    // Fixed test set shared by every rung.
    std::vector<double> test_X(static_cast<std::size_t>(test_points) * target.d);
    const std::uint64_t test_stream = stream_id("barron/test");
    for (std::size_t i = 0; i < test_X.size(); ++i)
        test_X[i] = standard_uniform(seed, test_stream, static_cast<std::uint64_t>(i));

    RateStudyResult res;
    res.ms.assign(m_ladder.begin(), m_ladder.end());
    res.mean_err.resize(m_ladder.size());
    res.std_err.resize(m_ladder.size());

    const std::uint64_t atom_base = stream_id("barron/net");
    struct Job {
        int rung;
        int trial;
    };
    std::vector<Job> jobs;
    for (std::size_t r = 0; r < m_ladder.size(); ++r)
        for (int t = 0; t < trials; ++t) jobs.push_back({static_cast<int>(r), t});
    std::vector<double> errs(jobs.size());
    for_chunks(jobs.size(), 1, exec, [&](std::size_t j, std::size_t, std::size_t) {
        const auto& job = jobs[j];
        auto net = sample_barron_network(
            target, m_ladder[static_cast<std::size_t>(job.rung)], seed,
            substream(atom_base, static_cast<std::uint64_t>(job.rung * 1000 + job.trial)));
        errs[j] = l2_error(net, target.f_star, test_X, test_points);
    });

    for (std::size_t r = 0; r < m_ladder.size(); ++r) {
        double mean = 0.0;
        for (int t = 0; t < trials; ++t) mean += errs[r * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)];
        mean /= static_cast<double>(trials);
        double var = 0.0;
        for (int t = 0; t < trials; ++t) {
            const double d2 = errs[r * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)] - mean;
            var += d2 * d2;
        }
        res.mean_err[r] = mean;
        res.std_err[r] = trials > 1 ? std::sqrt(var / (trials - 1.0) / trials) : 0.0;
    }

    std::vector<double> ms_d(m_ladder.size());
    for (std::size_t r = 0; r < m_ladder.size(); ++r) ms_d[r] = static_cast<double>(m_ladder[r]);
    res.slope = fit_loglog(ms_d, res.mean_err).slope;
    return res;
}

}  // namespace mlnum::meanfield
