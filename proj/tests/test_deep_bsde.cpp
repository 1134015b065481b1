#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mlnum/bsde/hopf_cole.hpp"
#include "mlnum/bsde/pde_problem.hpp"
#include "mlnum/bsde/solver.hpp"
#include "mlnum/bsde/train.hpp"
#include "mlnum/core/gaussian.hpp"
#include "testutil.hpp"

using namespace mlnum;
using namespace mlnum::bsde;

namespace {

double sum_coords(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v;
    return s;
}

}  // namespace

TEST_CASE("rollout loss: constant solution is exact") {
    const int d = 3, N = 4;
    auto problem = heat_problem(d, 1.0, {0.1, 0.2, 0.3},
                                [](std::span<const double>) { return 2.5; }, std::sqrt(2.0));
    BsdeSolverSpec spec;
    spec.d = d;
    spec.N = N;
    spec.hidden = {6};
    BsdeSolver solver(spec);
    // zero-initialized parameters: all Z identically 0
    solver.set_y0(2.5);
    sde::TimeGrid grid(1.0, N);
    auto dW = sde::sample_brownian(grid, d, 32, 9, 9);
    CHECK(solver.rollout_loss(problem, grid, dW) == 0.0);
}

TEST_CASE("rollout loss: exact telescoping with linear terminal") {
    // d = 1: Y and X apply the identical update sequence, so the loss is 0 to
    // the last bit; in higher d only the summation grouping differs.
    const int N = 6;
    sde::TimeGrid grid(1.0, N);

    SUBCASE("d = 1 bitwise") {
        auto problem = heat_problem(1, 1.0, {0.7}, sum_coords, std::sqrt(2.0));
        BsdeSolverSpec spec;
        spec.d = 1;
        spec.N = N;
        spec.hidden = {4};
        BsdeSolver solver(spec);
        solver.set_y0(0.7);
        solver.z0()[0] = std::sqrt(2.0);
        // interior subnets: zero weights, output bias sqrt(2)
        for (int n = 1; n < N; ++n) {
            auto b_last = solver.params().view("zsub" + std::to_string(n) + "/b1");
            for (double& v : b_last) v = std::sqrt(2.0);
        }
        auto dW = sde::sample_brownian(grid, 1, 64, 12, 5);
        CHECK(solver.rollout_loss(problem, grid, dW) == 0.0);
    }

    SUBCASE("d = 5 to round-off") {
        auto problem = heat_problem(5, 1.0, std::vector<double>(5, 0.4), sum_coords,
                                    std::sqrt(2.0));
        BsdeSolverSpec spec;
        spec.d = 5;
        spec.N = N;
        spec.hidden = {4};
        BsdeSolver solver(spec);
        solver.set_y0(5 * 0.4);
        for (double& v : solver.z0()) v = std::sqrt(2.0);
        for (int n = 1; n < N; ++n) {
            auto b_last = solver.params().view("zsub" + std::to_string(n) + "/b1");
            for (double& v : b_last) v = std::sqrt(2.0);
        }
        auto dW = sde::sample_brownian(grid, 5, 64, 12, 5);
        CHECK(solver.rollout_loss(problem, grid, dW) <= 1e-25);
    }
}

TEST_CASE("rollout loss: random init is positive and finite") {
    auto problem = hjb_lqg_problem(4, 1.0);
    BsdeSolverSpec spec;
    spec.d = 4;
    spec.N = 5;
    BsdeSolver solver(spec);
    solver.init(3, 3);
    sde::TimeGrid grid(1.0, 5);
    auto dW = sde::sample_brownian(grid, 4, 64, 4, 4);
    const double loss = solver.rollout_loss(problem, grid, dW);
    CHECK(std::isfinite(loss));
    CHECK(loss > 0.0);
}

TEST_CASE("rollout gradient vs finite differences (d=2, N=3)") {
    sde::TimeGrid grid(1.0, 3);
    auto dW = sde::sample_brownian(grid, 2, 8, 21, 2);

    auto check_problem = [&](const PdeProblem& problem) {
        BsdeSolverSpec spec;
        spec.d = 2;
        spec.N = 3;
        spec.hidden = {5};
        spec.act = nn::Activation::Tanh;
        BsdeSolver solver(spec);
        solver.init(7, 1);
        auto X = sde::euler_maruyama(problem.dynamics, grid, problem.xi, dW);
        std::vector<double> grad(solver.params().size());
        auto stats = solver.rollout_loss_grad(problem, grid, X, dW, grad);
        REQUIRE(stats.finite);
        RngStream rng(5, 5);
        auto rep = testutil::fd_check(
            solver.params(), grad,
            [&] {
                auto s = solver.rollout_loss_grad(problem, grid, X, dW, {});
                return s.loss;
            },
            120, rng, 1e-6);
        CHECK(rep.max_rel_err <= 1e-4);
    };

    SUBCASE("z-nonlinearity (quadratic driver)") { check_problem(hjb_lqg_problem(2, 0.8)); }
    SUBCASE("y-nonlinearity (default intensity driver)") {
        DefaultRiskParams params;
        params.Q = {0.3, 0.05, -0.5, 0.5};
        check_problem(black_scholes_default_problem(2, params));
    }
    SUBCASE("h = 0 (heat)") {
        check_problem(heat_problem(2, 1.0, {0.1, -0.2},
                                   [](std::span<const double> x) { return x[0] * x[0] + x[1]; },
                                   std::sqrt(2.0)));
    }
}

TEST_CASE("rollout serial/parallel bitwise agreement") {
    auto problem = hjb_lqg_problem(3, 1.0);
    BsdeSolverSpec spec;
    spec.d = 3;
    spec.N = 4;
    BsdeSolver solver(spec);
    solver.init(11, 2);
    sde::TimeGrid grid(1.0, 4);
    auto dW = sde::sample_brownian(grid, 3, 70, 6, 6);
    auto X = sde::euler_maruyama(problem.dynamics, grid, problem.xi, dW);
    std::vector<double> gs(solver.params().size()), gp(solver.params().size());
    auto ss = solver.rollout_loss_grad(problem, grid, X, dW, gs, Exec::Serial);
    auto sp = solver.rollout_loss_grad(problem, grid, X, dW, gp, Exec::Parallel);
    CHECK(ss.loss == sp.loss);
    for (std::size_t i = 0; i < gs.size(); ++i) CHECK(gs[i] == gp[i]);
}

TEST_CASE("tape interface: backward once") {
    auto problem = heat_problem(2, 1.0, {0.0, 0.0},
                                [](std::span<const double> x) { return x[0]; }, std::sqrt(2.0));
    BsdeSolverSpec spec;
    spec.d = 2;
    spec.N = 2;
    spec.hidden = {4};
    BsdeSolver solver(spec);
    solver.init(2, 9);
    sde::TimeGrid grid(1.0, 2);
    auto dW = sde::sample_brownian(grid, 2, 16, 3, 1);
    auto tape = solver.rollout_tape(problem, grid, dW);
    CHECK(std::isfinite(tape.value()));
    CHECK(tape.backward().size() == solver.params().size());
    CHECK_THROWS(tape.backward());
}

TEST_CASE("training the heat equation recovers the martingale value") {
    // u(0, x) = x for g(x) = x, so y0 must converge to xi.
    const double xi = 0.3;
    auto problem = heat_problem(1, 1.0, {xi}, sum_coords, std::sqrt(2.0));
    BsdeSolverSpec spec;
    spec.d = 1;
    spec.N = 5;
    spec.hidden = {8};
    spec.act = nn::Activation::Tanh;
    BsdeSolver solver(spec);
    solver.init(1, 1);

    BsdeTrainConfig cfg;
    cfg.batch = 128;
    cfg.iters = 400;
    cfg.eta = 5e-2;
    cfg.lr_schedule = {{0, 5e-2}, {200, 1e-2}, {320, 3e-3}};
    cfg.seed = 42;
    sde::TimeGrid grid(1.0, 5);
    auto rec = train_bsde(solver, problem, grid, cfg);
    REQUIRE_FALSE(rec.diverged);
    CHECK(std::abs(solver.y0() - xi) <= 0.01 * std::max(1.0, std::abs(xi)));

    SUBCASE("same seed gives identical records") {
        BsdeSolver s2(spec);
        s2.init(1, 1);
        auto rec2 = train_bsde(s2, problem, grid, cfg);
        REQUIRE(rec2.rows.size() == rec.rows.size());
        for (std::size_t i = 0; i < rec.rows.size(); ++i) {
            CHECK(rec2.rows[i].loss == rec.rows[i].loss);
            CHECK(rec2.rows[i].qoi == rec.rows[i].qoi);
        }
    }
}

TEST_CASE("hjb_lqg_problem structure") {
    CHECK_THROWS(hjb_lqg_problem(3, 0.0));
    CHECK_THROWS(hjb_lqg_problem(3, -1.0));
    auto p = hjb_lqg_problem(3, 2.0);
    std::vector<double> x{0.5, 0.5, 0.5}, z0(3, 0.0);
    CHECK(p.h(0.3, x, 1.7, z0) == 0.0);
    std::vector<double> z{1.0, -2.0, 0.5};
    CHECK(p.h(0.0, x, 0.0, z) == doctest::Approx(-0.5 * 2.0 * 5.25));
}

TEST_CASE("lqg with constant terminal trains to that constant") {
    const double c = 1.4;
    auto problem = hjb_lqg_problem(2, 1.0, 1.0, {},
                                   [c](std::span<const double>) { return c; });
    BsdeSolverSpec spec;
    spec.d = 2;
    spec.N = 4;
    spec.hidden = {6};
    spec.act = nn::Activation::Tanh;
    BsdeSolver solver(spec);
    solver.init(5, 2);
    BsdeTrainConfig cfg;
    cfg.batch = 64;
    cfg.iters = 300;
    cfg.eta = 3e-2;
    cfg.lr_schedule = {{0, 3e-2}, {200, 5e-3}};
    cfg.seed = 7;
    auto rec = train_bsde(solver, problem, sde::TimeGrid(1.0, 4), cfg);
    REQUIRE_FALSE(rec.diverged);
    CHECK(std::abs(solver.y0() - c) <= 0.05);
}

TEST_CASE("hopf-cole oracle") {
    SUBCASE("constant terminal is exact with zero standard error") {
        std::vector<double> x0(4, 0.0);
        auto est = hopf_cole_reference(4, 3.0, [](std::span<const double>) { return 1.25; }, 1.0,
                                       2000, 1, 1, x0);
        CHECK(est.value == doctest::Approx(1.25).epsilon(1e-14));
        CHECK(est.std_error == doctest::Approx(0.0));
    }
    SUBCASE("small lambda approaches the plain expectation") {
        std::vector<double> x0{0.0};
        auto est = hopf_cole_reference(1, 1e-6, sum_coords, 1.0, 200000, 3, 1, x0);
        CHECK(std::abs(est.value - 0.0) <= 3.0 * std::max(est.std_error, 1e-4));
    }
    SUBCASE("monotone non-increasing in lambda with common random numbers") {
        std::vector<double> x0(3, 0.0);
        double prev = std::numeric_limits<double>::infinity();
        for (double lambda : {1.0, 10.0, 30.0, 50.0}) {
            auto est = hopf_cole_reference(3, lambda, lqg_default_terminal, 1.0, 100000, 17, 4, x0);
            CHECK(est.value <= prev + 1e-12);
            prev = est.value;
        }
    }
    SUBCASE("max-shift stabilization does not move the value") {
        std::vector<double> x0(2, 0.0);
        auto with = hopf_cole_reference(2, 1.0, lqg_default_terminal, 1.0, 50000, 5, 5, x0, true);
        auto without =
            hopf_cole_reference(2, 1.0, lqg_default_terminal, 1.0, 50000, 5, 5, x0, false);
        CHECK(std::abs(with.value - without.value) <= 1e-10);
    }
}

TEST_CASE("default-risk problem validation and limits") {
    SUBCASE("malformed specs rejected") {
        DefaultRiskParams bad;
        bad.Q.v_h = 1.0;
        bad.Q.v_l = -1.0;  // thresholds out of order
        CHECK_THROWS(black_scholes_default_problem(3, bad));
        DefaultRiskParams bad2;
        bad2.Q.gamma_h = 0.01;
        bad2.Q.gamma_l = 0.2;  // increasing intensity
        CHECK_THROWS(black_scholes_default_problem(3, bad2));
        DefaultRiskParams bad3;
        bad3.delta = 1.5;
        CHECK_THROWS(black_scholes_default_problem(3, bad3));
    }

    SUBCASE("piecewise-linear intensity evaluates as specified") {
        PiecewiseLinearQ Q{0.2, 0.02, -5.0, -1.0};
        CHECK(Q(-6.0) == 0.2);
        CHECK(Q(0.0) == 0.02);
        CHECK(Q(-3.0) == doctest::Approx(0.2 + 0.5 * (0.02 - 0.2)));
        CHECK(Q.deriv(-3.0) == doctest::Approx((0.02 - 0.2) / 4.0));
        CHECK(Q.deriv(-6.0) == 0.0);
    }

    SUBCASE("constant-Q linear limit matches the exponential decay oracle") {
        // Q = q constant, g = c: u(0) = c exp(-((1-delta) q + R) T).
        const double c = 1.0, q = 0.2, delta = 0.5, R = 0.02, T = 1.0;
        DefaultRiskParams params;
        params.delta = delta;
        params.R = R;
        params.Q = {q, q, -1.0, 1.0};  // constant
        params.T = T;
        params.g = [c](std::span<const double>) { return c; };
        auto problem = black_scholes_default_problem(2, params);

        BsdeSolverSpec spec;
        spec.d = 2;
        spec.N = 20;
        spec.hidden = {6};
        spec.act = nn::Activation::Tanh;
        BsdeSolver solver(spec);
        solver.init(4, 4);
        BsdeTrainConfig cfg;
        cfg.batch = 64;
        cfg.iters = 400;
        cfg.eta = 2e-2;
        cfg.lr_schedule = {{0, 2e-2}, {250, 4e-3}};
        cfg.seed = 11;
        auto rec = train_bsde(solver, problem, sde::TimeGrid(T, 20), cfg);
        REQUIRE_FALSE(rec.diverged);
        const double want = c * std::exp(-((1.0 - delta) * q + R) * T);
        CHECK(std::abs(solver.y0() - want) <= 0.01 * std::abs(want));
    }
}

TEST_CASE("doubling N leaves the d=1 LQG value within tolerance") {
    auto problem = hjb_lqg_problem(1, 1.0);
    auto train_once = [&](int N) {
        BsdeSolverSpec spec;
        spec.d = 1;
        spec.N = N;
        spec.hidden = {8};
        spec.act = nn::Activation::Tanh;
        BsdeSolver solver(spec);
        solver.init(9, 1);
        BsdeTrainConfig cfg;
        cfg.batch = 128;
        cfg.iters = 500;
        cfg.eta = 3e-2;
        cfg.lr_schedule = {{0, 3e-2}, {300, 6e-3}};
        cfg.seed = 31;
        auto rec = train_bsde(solver, problem, sde::TimeGrid(1.0, N), cfg);
        REQUIRE_FALSE(rec.diverged);
        return solver.y0();
    };
    const double y10 = train_once(10);
    const double y20 = train_once(20);
    std::vector<double> x0{0.0};
    auto oracle = hopf_cole_reference(1, 1.0, lqg_default_terminal, 1.0, 1000000, 2, 2, x0);
    CHECK(std::abs(y10 - y20) <= 0.02 * std::max(1.0, std::abs(oracle.value)));
}

TEST_CASE("train record CSV export shape") {
    TrainRecord rec;
    rec.push(0, 1.0, 0.5, 0.1, 7);
    rec.push(1, 0.5, 0.6, 0.2, 7);
    auto csv = rec.to_csv("y0").body();
    CHECK(csv.find("step,loss,y0,seconds,seed") == 0);
    CHECK_THROWS(rec.push(1, 0.4, 0.7, 0.3, 7));  // steps strictly increasing
}
