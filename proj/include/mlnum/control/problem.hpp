#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mlnum::control {

// Discrete-time stochastic control problem
//   s_{t+1} = s_t + b_t(s_t, a_t) + xi_{t+1},
//   J = E[ sum_t c_t(s_t, a_t) + c_T(s_T) ].
// Dynamics and costs come with analytic partials; the simulator
// differentiates through the recursion, not through sampling.
struct ControlProblem {
    std::string name;
    int horizon = 1;      // T
    int state_dim = 1;
    int control_dim = 1;
    std::vector<double> s0;

    // b_t(s, a) and row-major Jacobians db/ds (state x state), db/da
    // (state x control). Null Jacobian means identically zero.
    std::function<void(int t, std::span<const double> s, std::span<const double> a,
                       std::span<double> out)>
        b;
    std::function<void(int t, std::span<const double> s, std::span<const double> a,
                       std::span<double> jac)>
        b_ds;
    std::function<void(int t, std::span<const double> s, std::span<const double> a,
                       std::span<double> jac)>
        b_da;

    std::function<double(int t, std::span<const double> s, std::span<const double> a)> cost;
    std::function<void(int t, std::span<const double> s, std::span<const double> a,
                       std::span<double> out)>
        cost_ds;
    std::function<void(int t, std::span<const double> s, std::span<const double> a,
                       std::span<double> out)>
        cost_da;

    std::function<double(std::span<const double> s)> terminal;
    std::function<void(std::span<const double> s, std::span<double> out)> terminal_ds;

    // xi ~ N(0, diag(noise_std^2)); empty means deterministic dynamics.
    std::vector<double> noise_std;

    // Optional box constraints, enforced by tanh squashing of the raw policy
    // output. Both vectors are full length when present.
    std::vector<double> a_lo, a_hi;

    // Optional affine equality constraints E a = c, handled by
    // reparameterizing a = a_part + N z onto the constraint manifold.
    std::vector<double> eq_E;  // eq_rows x control_dim, row-major
    std::vector<double> eq_c;  // eq_rows
    int eq_rows = 0;

    bool has_box() const { return !a_lo.empty(); }
    bool has_equality() const { return eq_rows > 0; }
    void validate() const;
};

// Noise batch (B, T, state_dim), already scaled by noise_std.
std::vector<double> sample_noise(const ControlProblem& problem, int B, std::uint64_t seed,
                                 std::uint64_t stream);

// Linear-quadratic benchmark: s' = A s + B a + xi, stage cost s'Qs + a'Ra,
// terminal s'QT s. Expressed in increment form b(s, a) = (A - I) s + B a.
struct LqSpec {
    int state_dim = 1;
    int control_dim = 1;
    int horizon = 1;
    std::vector<double> A, B, Q, R, QT;  // row-major, QT empty means Q
    std::vector<double> s0;
    std::vector<double> noise_std;  // empty means zero noise
};

ControlProblem make_lq_problem(const LqSpec& spec);

// Box-constrained storage-like toy (no oracle, qualitative only): levels
// s' = s + a + xi with a in [-a_max, a_max]^k, time-varying price, quadratic
// wear cost and a soft level-range penalty; terminal liquidation at the
// final price.
ControlProblem make_storage_toy(int devices, int horizon, double a_max = 1.0,
                                double noise_std = 0.05);

}  // namespace mlnum::control
