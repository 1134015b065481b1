#include "mlnum/control/simulate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mlnum::control {

namespace {

struct EqualityMap {
    // a = a_part + N z
    std::vector<double> a_part;  // control_dim
    std::vector<double> N;       // control_dim x nz, row-major
    int nz = 0;
};

EqualityMap build_equality_map(const ControlProblem& p) {
    EqualityMap map;
    const int m = p.control_dim;
    Eigen::MatrixXd E(p.eq_rows, m);
    Eigen::VectorXd c(p.eq_rows);
    for (int i = 0; i < p.eq_rows; ++i) {
        c(i) = p.eq_c[static_cast<std::size_t>(i)];
        for (int j = 0; j < m; ++j) E(i, j) = p.eq_E[static_cast<std::size_t>(i) * m + j];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(E);
    const Eigen::VectorXd part = cod.solve(c);
    if ((E * part - c).norm() > 1e-9 * std::max(1.0, c.norm()))
        throw std::invalid_argument("equality constraints are infeasible");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(E);
    const Eigen::MatrixXd kernel = lu.kernel();
    map.nz = static_cast<int>(kernel.cols());
    if (map.nz == 0)
        throw std::invalid_argument("equality constraints leave no control freedom");
    map.a_part.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) map.a_part[static_cast<std::size_t>(j)] = part(j);
    map.N.resize(static_cast<std::size_t>(m) * map.nz);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < map.nz; ++j) map.N[static_cast<std::size_t>(i) * map.nz + j] = kernel(i, j);
    return map;
}

}  // namespace

int policy_out_dim(const ControlProblem& problem) {
    problem.validate();
    if (!problem.has_equality()) return problem.control_dim;
    return build_equality_map(problem).nz;
}

SimulateStats simulate_cost_grad(const ControlProblem& problem, const PolicyStack& stack,
                                 std::span<const double> noise, int B, std::span<double> grad,
                                 Exec exec) {
    problem.validate();
    const int T = problem.horizon, n = problem.state_dim, m = problem.control_dim;
    const int out = stack.out_dim();
    if (stack.horizon() != T || stack.state_dim() != n)
        throw std::invalid_argument("simulate: stack does not match problem shape");
    if (noise.size() != static_cast<std::size_t>(B) * T * n)
        throw std::invalid_argument("simulate: noise batch shape mismatch");
    const bool want_grad = !grad.empty();
    if (want_grad && grad.size() != stack.params().size())
        throw std::invalid_argument("simulate: gradient length mismatch");

    EqualityMap eq;
    if (problem.has_equality()) {
        eq = build_equality_map(problem);
        if (eq.nz != out) throw std::invalid_argument("simulate: stack output dim != null-space dim");
    } else if (out != m) {
        throw std::invalid_argument("simulate: stack output dim != control dim");
    }
    const bool box = problem.has_box();

    const std::size_t n_params = stack.params().size();
    const std::size_t nc = chunk_count(static_cast<std::size_t>(B), kDefaultChunk);
    std::vector<double> chunk_cost(nc, 0.0);
    std::vector<int> chunk_bad_sample(nc, -1), chunk_bad_step(nc, -1);
    std::vector<std::vector<double>> chunk_grad(want_grad ? nc : 0);

    for_chunks(static_cast<std::size_t>(B), kDefaultChunk, exec,
               [&](std::size_t c, std::size_t cb, std::size_t ce) {
        const int Bc = static_cast<int>(ce - cb);
        std::vector<double> S(static_cast<std::size_t>(T + 1) * Bc * n);
        std::vector<double> RAW(static_cast<std::size_t>(T) * Bc * out);
        std::vector<double> ACT(static_cast<std::size_t>(T) * Bc * m);
        std::vector<nn::Mlp::Cache> caches(static_cast<std::size_t>(T));
        std::vector<double> cost(static_cast<std::size_t>(Bc), 0.0);
        std::vector<double> bv(static_cast<std::size_t>(n));

        for (int i = 0; i < Bc; ++i)
            for (int k = 0; k < n; ++k)
                S[static_cast<std::size_t>(i) * n + k] = problem.s0[static_cast<std::size_t>(k)];

        int bad_sample = -1, bad_step = -1;
        for (int t = 0; t < T && bad_step < 0; ++t) {
            double* St = S.data() + static_cast<std::size_t>(t) * Bc * n;
            double* St1 = S.data() + static_cast<std::size_t>(t + 1) * Bc * n;
            double* raw = RAW.data() + static_cast<std::size_t>(t) * Bc * out;
            double* act = ACT.data() + static_cast<std::size_t>(t) * Bc * m;
            stack.net(t).forward(stack.params(), std::span<const double>(St, static_cast<std::size_t>(Bc) * n),
                                 Bc, std::span<double>(raw, static_cast<std::size_t>(Bc) * out),
                                 want_grad ? &caches[static_cast<std::size_t>(t)] : nullptr);
            for (int i = 0; i < Bc; ++i) {
                const double* ri = raw + static_cast<std::size_t>(i) * out;
                double* ai = act + static_cast<std::size_t>(i) * m;
                if (problem.has_equality()) {
                    for (int k = 0; k < m; ++k) {
                        double v = eq.a_part[static_cast<std::size_t>(k)];
                        for (int j = 0; j < eq.nz; ++j)
                            v += eq.N[static_cast<std::size_t>(k) * eq.nz + j] * ri[j];
                        ai[k] = v;
                    }
                } else if (box) {
                    for (int k = 0; k < m; ++k) {
                        const double lo = problem.a_lo[static_cast<std::size_t>(k)];
                        const double hi = problem.a_hi[static_cast<std::size_t>(k)];
                        ai[k] = lo + (hi - lo) * 0.5 * (std::tanh(ri[k]) + 1.0);
                    }
                } else {
                    for (int k = 0; k < m; ++k) ai[k] = ri[k];
                }

                const double* si = St + static_cast<std::size_t>(i) * n;
                cost[static_cast<std::size_t>(i)] +=
                    problem.cost(t, std::span<const double>(si, n), std::span<const double>(ai, m));
                problem.b(t, std::span<const double>(si, n), std::span<const double>(ai, m), bv);
                const double* xi =
                    noise.data() + ((cb + static_cast<std::size_t>(i)) * T + static_cast<std::size_t>(t)) * n;
                double* si1 = St1 + static_cast<std::size_t>(i) * n;
                for (int k = 0; k < n; ++k) si1[k] = si[k] + bv[static_cast<std::size_t>(k)] + xi[k];
                if (bad_step < 0)
                    for (int k = 0; k < n; ++k)
                        if (!std::isfinite(si1[k])) {
                            bad_sample = static_cast<int>(cb) + i;
                            bad_step = t + 1;
                            break;
                        }
            }
        }
        if (bad_step >= 0) {
            chunk_bad_sample[c] = bad_sample;
            chunk_bad_step[c] = bad_step;
            return;
        }

        double acc = 0.0;
        const double* ST = S.data() + static_cast<std::size_t>(T) * Bc * n;
        for (int i = 0; i < Bc; ++i) {
            cost[static_cast<std::size_t>(i)] +=
                problem.terminal(std::span<const double>(ST + static_cast<std::size_t>(i) * n, n));
            acc += cost[static_cast<std::size_t>(i)];
            if (!std::isfinite(cost[static_cast<std::size_t>(i)]) && chunk_bad_step[c] < 0) {
                chunk_bad_sample[c] = static_cast<int>(cb) + i;
                chunk_bad_step[c] = T;
            }
        }
        chunk_cost[c] = acc;
        if (!want_grad || chunk_bad_step[c] >= 0) return;

        auto& cg = chunk_grad[c];
        cg.assign(n_params, 0.0);
        const double invB = 1.0 / static_cast<double>(B);

        std::vector<double> lam(static_cast<std::size_t>(Bc) * n);
        std::vector<double> lam_next(static_cast<std::size_t>(Bc) * n);
        std::vector<double> draw(static_cast<std::size_t>(Bc) * out);
        std::vector<double> dS(static_cast<std::size_t>(Bc) * n);
        std::vector<double> da(static_cast<std::size_t>(m));
        std::vector<double> scratch(static_cast<std::size_t>(std::max(n, m)));
        std::vector<double> jac(static_cast<std::size_t>(n) * std::max(n, m));

        for (int i = 0; i < Bc; ++i) {
            const double* si = ST + static_cast<std::size_t>(i) * n;
            double* li = lam.data() + static_cast<std::size_t>(i) * n;
            if (problem.terminal_ds) {
                problem.terminal_ds(std::span<const double>(si, n), std::span<double>(scratch.data(), static_cast<std::size_t>(n)));
                for (int k = 0; k < n; ++k) li[k] = invB * scratch[static_cast<std::size_t>(k)];
            } else {
                for (int k = 0; k < n; ++k) li[k] = 0.0;
            }
        }

        for (int t = T - 1; t >= 0; --t) {
            const double* St = S.data() + static_cast<std::size_t>(t) * Bc * n;
            const double* raw = RAW.data() + static_cast<std::size_t>(t) * Bc * out;
            const double* act = ACT.data() + static_cast<std::size_t>(t) * Bc * m;
            for (int i = 0; i < Bc; ++i) {
                const double* si = St + static_cast<std::size_t>(i) * n;
                const double* ai = act + static_cast<std::size_t>(i) * m;
                const double* ri = raw + static_cast<std::size_t>(i) * out;
                const double* li = lam.data() + static_cast<std::size_t>(i) * n;
                // dL/da = (1/B) dc/da + (db/da)' lam
                for (int k = 0; k < m; ++k) da[static_cast<std::size_t>(k)] = 0.0;
                if (problem.cost_da) {
                    problem.cost_da(t, std::span<const double>(si, n), std::span<const double>(ai, m),
                                    std::span<double>(scratch.data(), static_cast<std::size_t>(m)));
                    for (int k = 0; k < m; ++k) da[static_cast<std::size_t>(k)] = invB * scratch[static_cast<std::size_t>(k)];
                }
                if (problem.b_da) {
                    problem.b_da(t, std::span<const double>(si, n), std::span<const double>(ai, m),
                                 std::span<double>(jac.data(), static_cast<std::size_t>(n) * m));
                    for (int r = 0; r < n; ++r) {
                        const double lr = li[r];
                        for (int k = 0; k < m; ++k)
                            da[static_cast<std::size_t>(k)] += jac[static_cast<std::size_t>(r) * m + k] * lr;
                    }
                }
                double* dri = draw.data() + static_cast<std::size_t>(i) * out;
                if (problem.has_equality()) {
                    for (int j = 0; j < eq.nz; ++j) {
                        double v = 0.0;
                        for (int k = 0; k < m; ++k)
                            v += eq.N[static_cast<std::size_t>(k) * eq.nz + j] * da[static_cast<std::size_t>(k)];
                        dri[j] = v;
                    }
                } else if (box) {
                    for (int k = 0; k < m; ++k) {
                        const double th = std::tanh(ri[k]);
                        const double span_k = problem.a_hi[static_cast<std::size_t>(k)] -
                                              problem.a_lo[static_cast<std::size_t>(k)];
                        dri[k] = da[static_cast<std::size_t>(k)] * span_k * 0.5 * (1.0 - th * th);
                    }
                } else {
                    for (int k = 0; k < m; ++k) dri[k] = da[static_cast<std::size_t>(k)];
                }
            }
            stack.net(t).backward(stack.params(), std::span<const double>(St, static_cast<std::size_t>(Bc) * n),
                                  caches[static_cast<std::size_t>(t)], draw, Bc, cg, dS);
            for (int i = 0; i < Bc; ++i) {
                const double* si = St + static_cast<std::size_t>(i) * n;
                const double* ai = act + static_cast<std::size_t>(i) * m;
                const double* li = lam.data() + static_cast<std::size_t>(i) * n;
                double* lo = lam_next.data() + static_cast<std::size_t>(i) * n;
                const double* dsi = dS.data() + static_cast<std::size_t>(i) * n;
                for (int k = 0; k < n; ++k) lo[k] = li[k] + dsi[k];
                if (problem.cost_ds) {
                    problem.cost_ds(t, std::span<const double>(si, n), std::span<const double>(ai, m),
                                    std::span<double>(scratch.data(), static_cast<std::size_t>(n)));
                    for (int k = 0; k < n; ++k) lo[k] += invB * scratch[static_cast<std::size_t>(k)];
                }
                if (problem.b_ds) {
                    problem.b_ds(t, std::span<const double>(si, n), std::span<const double>(ai, m),
                                 std::span<double>(jac.data(), static_cast<std::size_t>(n) * n));
                    for (int r = 0; r < n; ++r) {
                        const double lr = li[r];
                        for (int k = 0; k < n; ++k)
                            lo[k] += jac[static_cast<std::size_t>(r) * n + k] * lr;
                    }
                }
            }
            std::swap(lam, lam_next);
        }
    });

    SimulateStats stats;
    for (std::size_t c = 0; c < nc; ++c) {
        if (chunk_bad_step[c] >= 0) {
            stats.finite = false;
            stats.bad_sample = chunk_bad_sample[c];
            stats.bad_step = chunk_bad_step[c];
            stats.mean_cost = std::numeric_limits<double>::quiet_NaN();
            return stats;
        }
    }
    double total = 0.0;
    for (double v : chunk_cost) total += v;
    stats.mean_cost = total / static_cast<double>(B);
    if (want_grad) {
        for (double& g : grad) g = 0.0;
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t i = 0; i < n_params; ++i) grad[i] += chunk_grad[c][i];
    }
    if (!std::isfinite(stats.mean_cost)) {
        stats.finite = false;
        stats.bad_step = T;
    }
    return stats;
}

double simulate_cost(const ControlProblem& problem, const PolicyStack& stack,
                     std::span<const double> noise, int B, Exec exec) {
    return simulate_cost_grad(problem, stack, noise, B, {}, exec).mean_cost;
}

nn::GradTape simulate_tape(const ControlProblem& problem, const PolicyStack& stack,
                           std::span<const double> noise, int B, Exec exec) {
    std::vector<double> grad(stack.params().size(), 0.0);
    auto stats = simulate_cost_grad(problem, stack, noise, B, grad, exec);
    if (!stats.finite)
        throw std::runtime_error("simulate: non-finite state or cost at sample " +
                                 std::to_string(stats.bad_sample) + ", step " +
                                 std::to_string(stats.bad_step));
    nn::GradTape tape(stack.params().size(), stats.mean_cost);
    tape.mutable_grad() = std::move(grad);
    return tape;
}

}  // namespace mlnum::control
