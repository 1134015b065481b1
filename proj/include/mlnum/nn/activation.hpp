#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlnum::nn {

enum class Activation { Relu, Tanh, Cos, Identity };

inline double act(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
        case Activation::Cos: return std::cos(z);
        case Activation::Identity: return z;
    }
    return z;
}

// Subgradient convention: relu'(0) = 0.
inline double act_deriv(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::Cos: return -std::sin(z);
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

// Second derivative, with the same relu convention (0 at the kink).
inline double act_deriv2(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return -2.0 * t * (1.0 - t * t);
        }
        case Activation::Cos: return -std::cos(z);
        case Activation::Identity: return 0.0;
    }
    return 0.0;
}

inline Activation activation_from_name(std::string_view name) {
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "cos") return Activation::Cos;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + std::string(name));
}

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Cos: return "cos";
        case Activation::Identity: return "identity";
    }
    return "?";
}

}  // namespace mlnum::nn
