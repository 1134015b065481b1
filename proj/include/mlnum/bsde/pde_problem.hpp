#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mlnum/sde/euler.hpp"

namespace mlnum::bsde {

// Terminal-value semilinear problem
//   du/dt + (1/2) Sigma Sigma^T : Hess u + mu . grad u + h(t, x, u, Sigma^T grad u) = 0,
//   u(T, x) = g(x),
// posed through its BSDE reformulation: simulate X under (mu, Sigma), then
//   Y_{n+1} = Y_n - h(t_n, X_n, Y_n, Z_n) dt + Z_n . dW_n
// and match g(X_N) at the terminal time.
struct PdeProblem {
    std::string name;
    int d = 1;
    double T = 1.0;
    std::vector<double> xi;  // start point

    sde::Dynamics dynamics;

    // Nonlinearity and its partials; null means identically zero (heat case).
    std::function<double(double t, std::span<const double> x, double y,
                         std::span<const double> z)>
        h;
    std::function<double(double t, std::span<const double> x, double y,
                         std::span<const double> z)>
        h_dy;
    std::function<void(double t, std::span<const double> x, double y, std::span<const double> z,
                       std::span<double> out)>
        h_dz;

    std::function<double(std::span<const double> x)> g;
};

// Heat specialization: mu = 0, Sigma = sigma_scalar * I, h = 0.
PdeProblem heat_problem(int d, double T, std::vector<double> xi,
                        std::function<double(std::span<const double>)> g,
                        double sigma_scalar);

// du/dt + Lap u - lambda |grad u|^2 = 0. In BSDE variables (Sigma = sqrt(2) I,
// z = Sigma^T grad u) the nonlinearity is h(z) = -lambda |z|^2 / 2.
// Default terminal condition: g(x) = log((1 + |x|^2) / 2).
PdeProblem hjb_lqg_problem(int d, double lambda, double T = 1.0,
                           std::vector<double> xi = {},
                           std::function<double(std::span<const double>)> g = nullptr);

double lqg_default_terminal(std::span<const double> x);

// Piecewise-linear non-increasing default intensity: gamma_h below v_h,
// gamma_l above v_l, linear in between.
struct PiecewiseLinearQ {
    double gamma_h = 0.2;
    double gamma_l = 0.02;
    double v_h = -5.0;
    double v_l = -1.0;

    void validate() const;
    double operator()(double y) const;
    double deriv(double y) const;
};

struct DefaultRiskParams {
    double delta = 2.0 / 3.0;  // recovery fraction
    double R = 0.02;           // discount rate
    PiecewiseLinearQ Q;
    double T = 1.0;
    std::vector<double> xi;                                    // default: origin
    std::function<double(std::span<const double>)> g;          // default: min_i x_i
};

// du/dt + Lap u - (1 - delta) Q(u) u - R u = 0.
PdeProblem black_scholes_default_problem(int d, const DefaultRiskParams& params);

}  // namespace mlnum::bsde
