#include "mlnum/control/problem.hpp"

#include <cmath>
#include <stdexcept>

#include "mlnum/core/gaussian.hpp"

namespace mlnum::control {

void ControlProblem::validate() const {
    if (horizon < 1 || state_dim < 1 || control_dim < 1)
        throw std::invalid_argument("control problem: positive horizon and dimensions required");
    if (static_cast<int>(s0.size()) != state_dim)
        throw std::invalid_argument("control problem: s0 dimension mismatch");
    if (!b || !cost || !terminal)
        throw std::invalid_argument("control problem: b, cost and terminal are required");
    if (has_box()) {
        if (a_lo.size() != static_cast<std::size_t>(control_dim) || a_hi.size() != a_lo.size())
            throw std::invalid_argument("control problem: box bounds must cover every control");
        for (int k = 0; k < control_dim; ++k)
            if (!(a_lo[static_cast<std::size_t>(k)] < a_hi[static_cast<std::size_t>(k)]))
                throw std::invalid_argument("control problem: box bounds must be ordered");
    }
    if (has_equality()) {
        if (has_box())
            throw std::invalid_argument(
                "control problem: combined box and equality constraints are not supported");
        if (eq_E.size() != static_cast<std::size_t>(eq_rows) * control_dim ||
            eq_c.size() != static_cast<std::size_t>(eq_rows))
            throw std::invalid_argument("control problem: equality constraint shape mismatch");
    }
    if (!noise_std.empty() && noise_std.size() != static_cast<std::size_t>(state_dim))
        throw std::invalid_argument("control problem: noise_std dimension mismatch");
}

std::vector<double> sample_noise(const ControlProblem& problem, int B, std::uint64_t seed,
                                 std::uint64_t stream) {
    const int T = problem.horizon, d = problem.state_dim;
    std::vector<double> out(static_cast<std::size_t>(B) * T * d, 0.0);
    if (problem.noise_std.empty()) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::size_t k = i % static_cast<std::size_t>(d);
        out[i] = problem.noise_std[k] * standard_normal(seed, stream, i);
    }
    return out;
}

ControlProblem make_lq_problem(const LqSpec& spec) {
    const int n = spec.state_dim, m = spec.control_dim;
    if (spec.A.size() != static_cast<std::size_t>(n) * n ||
        spec.B.size() != static_cast<std::size_t>(n) * m ||
        spec.Q.size() != static_cast<std::size_t>(n) * n ||
        spec.R.size() != static_cast<std::size_t>(m) * m)
        throw std::invalid_argument("lq problem: matrix shape mismatch");

    auto data = std::make_shared<LqSpec>(spec);
    if (data->QT.empty()) data->QT = data->Q;
    if (data->QT.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("lq problem: QT shape mismatch");

    ControlProblem p;
    p.name = "lq";
    p.horizon = spec.horizon;
    p.state_dim = n;
    p.control_dim = m;
    p.s0 = spec.s0;
    p.noise_std = spec.noise_std;

    p.b = [data, n, m](int, std::span<const double> s, std::span<const double> a,
                       std::span<double> out) {
        for (int i = 0; i < n; ++i) {
            double v = -s[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) v += data->A[static_cast<std::size_t>(i) * n + j] * s[static_cast<std::size_t>(j)];
            for (int j = 0; j < m; ++j) v += data->B[static_cast<std::size_t>(i) * m + j] * a[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = v;
        }
    };
    p.b_ds = [data, n](int, std::span<const double>, std::span<const double>,
                       std::span<double> jac) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                jac[static_cast<std::size_t>(i) * n + j] =
                    data->A[static_cast<std::size_t>(i) * n + j] - (i == j ? 1.0 : 0.0);
    };
    p.b_da = [data, n, m](int, std::span<const double>, std::span<const double>,
                          std::span<double> jac) {
        for (int i = 0; i < n * m; ++i) jac[static_cast<std::size_t>(i)] = data->B[static_cast<std::size_t>(i)];
    };
    p.cost = [data, n, m](int, std::span<const double> s, std::span<const double> a) {
        double v = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                v += s[static_cast<std::size_t>(i)] * data->Q[static_cast<std::size_t>(i) * n + j] * s[static_cast<std::size_t>(j)];
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                v += a[static_cast<std::size_t>(i)] * data->R[static_cast<std::size_t>(i) * m + j] * a[static_cast<std::size_t>(j)];
        return v;
    };
    p.cost_ds = [data, n](int, std::span<const double> s, std::span<const double>,
                          std::span<double> out) {
        for (int i = 0; i < n; ++i) {
            double v = 0.0;
            for (int j = 0; j < n; ++j)
                v += (data->Q[static_cast<std::size_t>(i) * n + j] + data->Q[static_cast<std::size_t>(j) * n + i]) * s[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = v;
        }
    };
    p.cost_da = [data, m](int, std::span<const double>, std::span<const double> a,
                          std::span<double> out) {
        for (int i = 0; i < m; ++i) {
            double v = 0.0;
            for (int j = 0; j < m; ++j)
                v += (data->R[static_cast<std::size_t>(i) * m + j] + data->R[static_cast<std::size_t>(j) * m + i]) * a[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = v;
        }
    };
    p.terminal = [data, n](std::span<const double> s) {
        double v = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                v += s[static_cast<std::size_t>(i)] * data->QT[static_cast<std::size_t>(i) * n + j] * s[static_cast<std::size_t>(j)];
        return v;
    };
    p.terminal_ds = [data, n](std::span<const double> s, std::span<double> out) {
        for (int i = 0; i < n; ++i) {
            double v = 0.0;
            for (int j = 0; j < n; ++j)
                v += (data->QT[static_cast<std::size_t>(i) * n + j] + data->QT[static_cast<std::size_t>(j) * n + i]) * s[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = v;
        }
    };
    p.validate();
    return p;
}

ControlProblem make_storage_toy(int devices, int horizon, double a_max, double noise_std) {
    if (devices < 1 || horizon < 1)
        throw std::invalid_argument("storage toy: positive devices and horizon required");
    const int k = devices;
    const double level_cap = 4.0, wear = 0.02, soft = 5.0;

    auto price = [horizon](int t) {
        return 1.0 + 0.5 * std::sin(6.283185307179586 * t / std::max(1, horizon));
    };

    ControlProblem p;
    p.name = "storage_toy";
    p.horizon = horizon;
    p.state_dim = k;
    p.control_dim = k;
    p.s0.assign(static_cast<std::size_t>(k), 2.0);
    p.noise_std.assign(static_cast<std::size_t>(k), noise_std);
    p.a_lo.assign(static_cast<std::size_t>(k), -a_max);
    p.a_hi.assign(static_cast<std::size_t>(k), a_max);

    p.b = [](int, std::span<const double>, std::span<const double> a, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i];
    };
    p.b_da = [k](int, std::span<const double>, std::span<const double>, std::span<double> jac) {
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) jac[static_cast<std::size_t>(i) * k + j] = (i == j) ? 1.0 : 0.0;
    };
    p.cost = [price, wear, soft, level_cap](int t, std::span<const double> s,
                                            std::span<const double> a) {
        double v = 0.0;
        const double pt = price(t);
        for (std::size_t i = 0; i < a.size(); ++i) v += pt * a[i] + wear * a[i] * a[i];
        for (double si : s) {
            const double over = std::max(0.0, si - level_cap), under = std::max(0.0, -si);
            v += soft * (over * over + under * under);
        }
        return v;
    };
    p.cost_da = [price, wear](int t, std::span<const double>, std::span<const double> a,
                              std::span<double> out) {
        const double pt = price(t);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = pt + 2.0 * wear * a[i];
    };
    p.cost_ds = [soft, level_cap](int, std::span<const double> s, std::span<const double>,
                                  std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double over = std::max(0.0, s[i] - level_cap), under = std::max(0.0, -s[i]);
            out[i] = soft * (2.0 * over - 2.0 * under);
        }
    };
    p.terminal = [price, horizon](std::span<const double> s) {
        double v = 0.0;
        for (double si : s) v -= price(horizon) * si;
        return v;
    };
    p.terminal_ds = [price, horizon](std::span<const double> s, std::span<double> out) {
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = -price(horizon);
    };
    p.validate();
    return p;
}

}  // namespace mlnum::control
