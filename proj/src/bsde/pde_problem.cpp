#include "mlnum/bsde/pde_problem.hpp"

#include <cmath>
#include <stdexcept>

namespace mlnum::bsde {

double lqg_default_terminal(std::span<const double> x) {
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    return std::log(0.5 * (1.0 + norm2));
}

PdeProblem heat_problem(int d, double T, std::vector<double> xi,
                        std::function<double(std::span<const double>)> g,
                        double sigma_scalar) {
    if (d < 1) throw std::invalid_argument("heat_problem: d >= 1 required");
    PdeProblem p;
    p.name = "heat";
    p.d = d;
    p.T = T;
    p.xi = xi.empty() ? std::vector<double>(d, 0.0) : std::move(xi);
    if (static_cast<int>(p.xi.size()) != d)
        throw std::invalid_argument("heat_problem: xi dimension mismatch");
    p.dynamics.sigma_scalar = sigma_scalar;
    p.g = std::move(g);
    return p;
}

PdeProblem hjb_lqg_problem(int d, double lambda, double T, std::vector<double> xi,
                           std::function<double(std::span<const double>)> g) {
    if (d < 1) throw std::invalid_argument("hjb_lqg_problem: d >= 1 required");
    if (!(lambda > 0.0)) throw std::invalid_argument("hjb_lqg_problem: lambda must be positive");
    PdeProblem p;
    p.name = "hjb_lqg";
    p.d = d;
    p.T = T;
    p.xi = xi.empty() ? std::vector<double>(d, 0.0) : std::move(xi);
    if (static_cast<int>(p.xi.size()) != d)
        throw std::invalid_argument("hjb_lqg_problem: xi dimension mismatch");
    p.dynamics.sigma_scalar = std::sqrt(2.0);
    p.g = g ? std::move(g) : lqg_default_terminal;
    p.h = [lambda](double, std::span<const double>, double, std::span<const double> z) {
        double n2 = 0.0;
        for (double v : z) n2 += v * v;
        return -0.5 * lambda * n2;
    };
    p.h_dz = [lambda](double, std::span<const double>, double, std::span<const double> z,
                      std::span<double> out) {
        for (std::size_t k = 0; k < z.size(); ++k) out[k] = -lambda * z[k];
    };
    return p;
}

void PiecewiseLinearQ::validate() const {
    if (!(v_h < v_l)) throw std::invalid_argument("Q spec: thresholds must satisfy v_h < v_l");
    if (!(gamma_h >= gamma_l) || gamma_l < 0.0)
        throw std::invalid_argument("Q spec: rates must satisfy gamma_h >= gamma_l >= 0");
}

double PiecewiseLinearQ::operator()(double y) const {
    if (y <= v_h) return gamma_h;
    if (y >= v_l) return gamma_l;
    return gamma_h + (y - v_h) / (v_l - v_h) * (gamma_l - gamma_h);
}

double PiecewiseLinearQ::deriv(double y) const {
    if (y <= v_h || y >= v_l) return 0.0;
    return (gamma_l - gamma_h) / (v_l - v_h);
}

PdeProblem black_scholes_default_problem(int d, const DefaultRiskParams& params) {
    if (d < 1) throw std::invalid_argument("default risk: d >= 1 required");
    if (params.delta < 0.0 || params.delta > 1.0)
        throw std::invalid_argument("default risk: delta must lie in [0, 1]");
    if (params.R < 0.0) throw std::invalid_argument("default risk: R must be nonnegative");
    params.Q.validate();

    PdeProblem p;
    p.name = "black_scholes_default";
    p.d = d;
    p.T = params.T;
    p.xi = params.xi.empty() ? std::vector<double>(d, 0.0) : params.xi;
    if (static_cast<int>(p.xi.size()) != d)
        throw std::invalid_argument("default risk: xi dimension mismatch");
    p.dynamics.sigma_scalar = std::sqrt(2.0);
    p.g = params.g ? params.g : [](std::span<const double> x) {
        double m = x[0];
        for (double v : x) m = std::min(m, v);
        return m;
    };
    const double delta = params.delta, R = params.R;
    const PiecewiseLinearQ Q = params.Q;
    p.h = [delta, R, Q](double, std::span<const double>, double y, std::span<const double>) {
        return -(1.0 - delta) * Q(y) * y - R * y;
    };
    p.h_dy = [delta, R, Q](double, std::span<const double>, double y, std::span<const double>) {
        return -(1.0 - delta) * (Q.deriv(y) * y + Q(y)) - R;
    };
    return p;
}

}  // namespace mlnum::bsde
