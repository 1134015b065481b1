#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mlnum/core/philox.hpp"
#include "mlnum/meanfield/barron.hpp"
#include "mlnum/meanfield/fourier.hpp"
#include "mlnum/meanfield/heatmap.hpp"
#include "mlnum/meanfield/mc.hpp"
#include "mlnum/meanfield/particle_flow.hpp"
#include "mlnum/meanfield/rademacher.hpp"
#include "mlnum/meanfield/regularized.hpp"
#include "mlnum/meanfield/runge.hpp"
#include "testutil.hpp"

using namespace mlnum;
using namespace mlnum::meanfield;

TEST_CASE("mc_integrate") {
    SUBCASE("constant integrand has zero variance") {
        auto g = [](std::span<const double>) { return 0.75; };
        for (long m : {1L, 7L, 100L})
            CHECK(mc_integrate(g, 2, m, McSampler::UniformCube, 1, 1) == 0.75);
    }
    SUBCASE("replicated mse matches var(g)/m for g(x)=x") {
        auto g = [](std::span<const double> x) { return x[0]; };
        const double mse = replicated_mse(g, 0.5, 1, 100, 4000, McSampler::UniformCube, 3);
        CHECK(mse == doctest::Approx(1.0 / 1200.0).epsilon(0.08));
    }
    SUBCASE("antithetic averaging reduces mse by the variance ratio") {
        auto g = [](std::span<const double> x) { return x[0] * x[0]; };
        auto h = [](std::span<const double> x) {
            const double u = x[0];
            return 0.5 * (u * u + (1.0 - u) * (1.0 - u));
        };
        const double mse_g = replicated_mse(g, 1.0 / 3.0, 1, 64, 4000, McSampler::UniformCube, 5);
        const double mse_h = replicated_mse(h, 1.0 / 3.0, 1, 64, 4000, McSampler::UniformCube, 5);
        // var(g) = 4/45, var(h) = 1/180, exact ratio 1/16
        CHECK(mse_h / mse_g == doctest::Approx(1.0 / 16.0).epsilon(0.25));
    }
    SUBCASE("log-log slope of mse against m is -1") {
        auto g = [](std::span<const double> x) { return x[0]; };
        std::vector<double> ms{25, 50, 100, 200, 400}, mses;
        for (double m : ms)
            mses.push_back(replicated_mse(g, 0.5, 1, static_cast<long>(m), 3000,
                                          McSampler::UniformCube, 11));
        const auto fit = fit_loglog(ms, mses);
        CHECK(fit.slope >= -1.1);
        CHECK(fit.slope <= -0.9);
    }
}

TEST_CASE("fit_loglog recovers exact power laws and rejects degenerate input") {
    std::vector<double> xs{2, 4, 8, 16}, ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, -0.5));
    CHECK(fit_loglog(xs, ys).slope == doctest::Approx(-0.5));
    std::vector<double> flat_x{1, 1, 1, 1};
    CHECK_THROWS(fit_loglog(flat_x, ys));
    std::vector<double> bad_y{1, -1, 2, 3};
    CHECK_THROWS(fit_loglog(xs, bad_y));
}

TEST_CASE("fourier feature approximation") {
    auto ones = [](std::span<const double>) { return 1.0; };
    auto gaussian_cf = [](std::span<const double> x) {
        double n2 = 0;
        for (double v : x) n2 += v * v;
        return std::exp(-0.5 * n2);
    };

    SUBCASE("single feature reproduces its own deviation") {
        auto res = fourier_feature_approx(ones, 2, 1, 5, 5, gaussian_cf, 2000);
        // recompute the reported error directly from the returned model
        const std::uint64_t ts = substream(5, stream_id("fourier/test"));
        double acc = 0;
        std::vector<double> x(2);
        for (int i = 0; i < 2000; ++i) {
            for (int k = 0; k < 2; ++k)
                x[static_cast<std::size_t>(k)] = standard_normal(5, ts, static_cast<std::uint64_t>(i) * 2 + static_cast<std::uint64_t>(k));
            const double e = res.net.forward(x) - gaussian_cf(x);
            acc += e * e;
        }
        CHECK(res.l2_error_sq == doctest::Approx(acc / 2000.0));
    }

    SUBCASE("squared error decays like 1/m") {
        std::vector<double> ms, errs;
        for (int p = 4; p <= 10; ++p) {
            const int m = 1 << p;
            double acc = 0;
            for (int rep = 0; rep < 4; ++rep) {
                auto res = fourier_feature_approx(ones, 3, m, 21, substream(7, static_cast<std::uint64_t>(100 * p + rep)),
                                                  gaussian_cf, 3000);
                acc += res.l2_error_sq;
            }
            ms.push_back(m);
            errs.push_back(acc / 4.0);
        }
        const auto fit = fit_loglog(ms, errs);
        CHECK(fit.slope >= -1.25);
        CHECK(fit.slope <= -0.8);
    }

    SUBCASE("rate constant is dimension-robust (d=2 vs d=20)") {
        const int m = 512;
        double e2 = 0, e20 = 0;
        for (int rep = 0; rep < 12; ++rep) {
            e2 += fourier_feature_approx(ones, 2, m, 31, substream(1, static_cast<std::uint64_t>(rep)), gaussian_cf, 3000)
                      .l2_error_sq;
            e20 += fourier_feature_approx(ones, 20, m, 31, substream(2, static_cast<std::uint64_t>(rep)), gaussian_cf, 3000)
                       .l2_error_sq;
        }
        CHECK(e20 / e2 <= 2.0);
        CHECK(e2 / e20 <= 2.0);
    }
}

TEST_CASE("barron direct-rate study") {
    SUBCASE("point-mass target is realized exactly at every m") {
        auto target = barron_point_mass(4);
        std::vector<double> test_X(500 * 4);
        for (std::size_t i = 0; i < test_X.size(); ++i)
            test_X[i] = standard_uniform(3, 3, static_cast<std::uint64_t>(i));
        for (int m : {1, 3, 16}) {
            auto net = sample_barron_network(target, m, 5, 5);
            CHECK(l2_error(net, target.f_star, test_X, 500) <= 1e-14);
        }
    }
    SUBCASE("relu mixture rate is about -1/2 and quadruple-m halves the error") {
        auto target = barron_relu_atoms(6, 48, 99);
        std::vector<int> ladder{16, 32, 64, 128, 256, 512};
        auto res = barron_rate_study(target, ladder, 12, 2000, 7);
        CHECK(res.slope >= -0.65);
        CHECK(res.slope <= -0.35);
        const double ratio = res.mean_err[0] / res.mean_err[2];  // m vs 4m
        CHECK(ratio == doctest::Approx(2.0).epsilon(0.30));
    }
    SUBCASE("ladder must have at least 4 rungs") {
        auto target = barron_relu_gaussian(3);
        std::vector<int> ladder{8, 16, 32};
        CHECK_THROWS(barron_rate_study(target, ladder, 2, 100, 1));
    }
}

TEST_CASE("rademacher complexity estimates") {
    // dataset on the cube
    const int n = 64, d = 6;
    std::vector<double> X(static_cast<std::size_t>(n) * d);
    for (std::size_t i = 0; i < X.size(); ++i) X[i] = standard_uniform(17, 1, static_cast<std::uint64_t>(i));

    SUBCASE("singleton class estimate concentrates at zero") {
        std::vector<TargetFn> cls{[](std::span<const double>) { return 1.0; }};
        const double est = rademacher_finite(cls, X, n, d, 4000, 3);
        CHECK(std::abs(est) <= 3.0 / std::sqrt(static_cast<double>(n) * 4000));
    }
    SUBCASE("pair {h, -h} with h = 1 and n = 2 gives 1/2") {
        std::vector<double> X2{0.1, 0.9};
        std::vector<TargetFn> cls{[](std::span<const double>) { return 1.0; },
                                  [](std::span<const double>) { return -1.0; }};
        const double est = rademacher_finite(cls, X2, 2, 1, 8000, 5);
        CHECK(est == doctest::Approx(0.5).epsilon(0.08));
    }
    SUBCASE("ball estimate stays under the theory bound") {
        RademacherOptions opt;
        auto res = rademacher_barron_ball(X, n, d, 1.0, opt, 11);
        CHECK(res.estimate > 0.0);
        CHECK(res.estimate <= res.bound);
        CHECK(res.budget_used == static_cast<long>(opt.trials) * opt.starts * opt.steps);
        auto res3 = rademacher_barron_ball(X, n, d, 3.0, opt, 11);
        CHECK(res3.estimate <= res3.bound);
    }
}

TEST_CASE("regularized training") {
    auto target = [](std::span<const double> x) { return std::max(0.0, x[0]); };
    auto train = sample_dataset(target, 200, 10, 31, 1);
    auto test = sample_dataset(target, 4000, 10, 31, 2);

    SUBCASE("lambda = 0 reproduces plain gradient descent bitwise") {
        RegularizedConfig cfg;
        cfg.steps = 60;
        cfg.eta = 0.05;
        nn::ScaledTwoLayerNet reg_net({10, 16, nn::Activation::Relu, false});
        reg_net.init_uniform(7, 7, -1, 1, -1, 1);
        nn::ScaledTwoLayerNet plain({10, 16, nn::Activation::Relu, false});
        plain.init_uniform(7, 7, -1, 1, -1, 1);

        regularized_train(reg_net, train, 0.0, cfg, test);
        std::vector<double> grad(plain.params().size());
        for (int s = 0; s < cfg.steps; ++s) {
            plain.risk_grad(train.X, train.y, train.n, grad);
            auto theta = plain.params().data();
            for (std::size_t i = 0; i < grad.size(); ++i) theta[i] -= cfg.eta * grad[i];
        }
        for (std::size_t i = 0; i < grad.size(); ++i)
            CHECK(reg_net.params().data()[i] == plain.params().data()[i]);
    }

    SUBCASE("huge lambda drives the path norm and predictor to zero") {
        RegularizedConfig cfg;
        cfg.steps = 3000;
        cfg.eta = 0.02;
        nn::ScaledTwoLayerNet net({10, 16, nn::Activation::Relu, false});
        net.init_uniform(9, 9, -1, 1, -1, 1);
        const double pn0 = net.path_norm();
        auto rep = regularized_train(net, train, 500.0, cfg, test);
        CHECK(rep.path_norm <= 0.05 * pn0);
        // predictor collapses toward 0, so test risk approaches E[f*^2]
        double ef2 = 0;
        for (int i = 0; i < test.n; ++i) ef2 += test.y[static_cast<std::size_t>(i)] * test.y[static_cast<std::size_t>(i)];
        ef2 /= test.n;
        CHECK(rep.test_risk == doctest::Approx(ef2).epsilon(0.25));
    }

    SUBCASE("moderate lambda keeps the generalization gap small across seeds") {
        RegularizedConfig cfg;
        cfg.steps = 1500;
        cfg.eta = 0.05;
        for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
            nn::ScaledTwoLayerNet net({10, 16, nn::Activation::Relu, false});
            net.init_uniform(seed, 13, -1, 1, -1, 1);
            auto rep = regularized_train(net, train, 0.05, cfg, test);
            CHECK(rep.test_risk <= 3.0 * rep.emp_risk + 1e-3);
        }
    }
}

TEST_CASE("particle flow equals gradient descent bitwise") {
    auto target = [](std::span<const double> x) { return x[0] - 0.5 * x[1]; };
    SUBCASE("random configurations, zero deviation") {
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            auto data = sample_dataset(target, 24, 3, seed, 4);
            for (auto act : {nn::Activation::Relu, nn::Activation::Tanh}) {
                auto res = particle_flow_equivalence(data, 9, 25, 0.05, act, seed);
                CHECK(res.max_param_deviation == 0.0);
                CHECK(res.steps_run == 25);
            }
        }
    }
    SUBCASE("eta = 0 freezes both trajectories") {
        auto data = sample_dataset(target, 10, 3, 5, 4);
        auto res = particle_flow_equivalence(data, 4, 10, 0.0, nn::Activation::Tanh, 5);
        CHECK(res.max_param_deviation == 0.0);
    }
    SUBCASE("single particle, single sample matches the hand update") {
        // f = a relu(w x), one data point (x, y): after one step with lr eta,
        //   a' = a - eta 2 (f - y) relu(s),  w' = w - eta 2 (f - y) a 1{s>0} x
        SupervisedDataset data;
        data.d = 1;
        data.n = 1;
        data.X = {0.8};
        data.y = {1.0};
        nn::ScaledTwoLayerNet net({1, 1, nn::Activation::Relu, false});
        net.init_uniform(11, stream_id("particle_flow/init"), -1, 1, -1, 1);
        const double a0 = net.a()[0], w0 = net.w()[0];
        const double s = w0 * 0.8;
        const double f = a0 * std::max(0.0, s);
        const double coeff = 2.0 * (f - 1.0);
        const double eta = 0.1;
        const double a1 = a0 - eta * coeff * std::max(0.0, s);
        const double w1 = w0 - eta * coeff * a0 * (s > 0 ? 1.0 : 0.0) * 0.8;

        auto res = particle_flow_equivalence(data, 1, 1, eta, nn::Activation::Relu, 11);
        CHECK(res.max_param_deviation == 0.0);
        nn::ScaledTwoLayerNet check({1, 1, nn::Activation::Relu, false});
        check.init_uniform(11, stream_id("particle_flow/init"), -1, 1, -1, 1);
        std::vector<double> grad(2);
        check.risk_grad(data.X, data.y, 1, grad);
        check.params().data()[0] -= eta * grad[0];
        check.params().data()[1] -= eta * grad[1];
        CHECK(check.a()[0] == doctest::Approx(a1).epsilon(1e-12));
        CHECK(check.w()[0] == doctest::Approx(w1).epsilon(1e-12));
    }
}

TEST_CASE("heatmap experiment smoke") {
    HeatmapConfig cfg;
    cfg.ms = {1, 8};
    cfg.ns = {16, 64};
    cfg.seeds = {1, 2};
    cfg.steps = 200;
    cfg.test_points = 1000;
    auto scaled = heatmap_experiment(cfg, true);
    auto unscaled = heatmap_experiment(cfg, false);
    CHECK(scaled.size() == 8);
    CHECK(unscaled.size() == 8);
    for (const auto& c : scaled) {
        CHECK(c.scaled);
        if (!c.diverged) CHECK(std::isfinite(c.test_error));
    }
    // deterministic reruns
    auto again = heatmap_experiment(cfg, true, Exec::Serial);
    for (std::size_t i = 0; i < scaled.size(); ++i)
        CHECK(scaled[i].test_error == again[i].test_error);
}

TEST_CASE("runge phenomenon") {
    SUBCASE("degree-2 polynomial target is reproduced") {
        auto sq = [](double x) { return x * x; };
        CHECK(max_interp_error_equidistant(sq, 2) <= 1e-12);
    }
    SUBCASE("degree 10 error matches the independent newton oracle") {
        std::vector<int> degrees{10, 20};
        auto errs = runge_demo(degrees);
        CHECK(errs[0] == doctest::Approx(1.9156587167845647).epsilon(1e-6));
        CHECK(errs[1] > errs[0]);
    }
    SUBCASE("degree below 2 rejected") {
        CHECK_THROWS(max_interp_error_equidistant(runge_fn, 1));
    }
}
