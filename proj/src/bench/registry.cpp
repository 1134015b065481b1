#include "mlnum/bench/registry.hpp"

namespace mlnum::bench {

const std::vector<ExperimentInfo>& experiment_registry() {
    static const std::vector<ExperimentInfo> kRegistry = {
        {"deep_bsde",
         "train y0 and per-step Z-subnetworks against the terminal-matching loss",
         "semilinear parabolic PDEs via BSDE reformulation; Hopf-Cole and heat-kernel oracles"},
        {"policy_control",
         "train one feedback-policy network per time step against simulated total cost",
         "discrete-time stochastic control; exact Riccati oracle on the LQ benchmark"},
        {"heatmap",
         "test-error grid over (m, n) for scaled vs unscaled two-layer nets, single-neuron target",
         "robustness of the mean-field parametrization"},
        {"rate_study",
         "Monte Carlo construction error of expectation-represented targets over an m-ladder",
         "dimension-free 1/sqrt(m) direct approximation rate"},
        {"rademacher",
         "empirical Rademacher complexity of path-norm balls via multi-start inner ascent",
         "generalization-gap bound 2Q sqrt(2 ln(2d)/n)"},
        {"mc_rate",
         "replicated mean-squared error of Monte Carlo integration against var(g)/m",
         "Monte Carlo rate identity"},
        {"runge",
         "max error of equidistant polynomial interpolation of 1/(1+25x^2) per degree",
         "divergence of grid-based interpolation under refinement"},
        {"msa_compare",
         "extended/basic successive-approximation training vs an SGD baseline on a scaled resnet",
         "Hamiltonian-maximization training at matched gradient-evaluation budget"},
        {"regularized",
         "path-norm regularized two-layer regression across lambda values",
         "a-priori estimate: empirical risk, path norm and test risk"},
    };
    return kRegistry;
}

bool is_known_experiment(std::string_view kind) {
    for (const auto& e : experiment_registry())
        if (e.kind == kind) return true;
    return false;
}

std::string registry_listing() {
    std::string out;
    for (const auto& e : experiment_registry()) {
        out += e.kind;
        out += "\n    ";
        out += e.description;
        out += "\n    topic: ";
        out += e.topic;
        out += "\n";
    }
    return out;
}

}  // namespace mlnum::bench
