#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mlnum::meanfield {

double runge_fn(double x);

// Max |f - p| over a dense uniform grid on [-1, 1], where p interpolates f at
// degree+1 equidistant nodes (barycentric form with binomial weights).
double max_interp_error_equidistant(const std::function<double(double)>& f, int degree,
                                    int grid_points = 10000);

// Per-degree max interpolation error of the classic 1/(1+25x^2) target.
std::vector<double> runge_demo(std::span<const int> degrees);

}  // namespace mlnum::meanfield
