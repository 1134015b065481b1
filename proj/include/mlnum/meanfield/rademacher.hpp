#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlnum/meanfield/dataset.hpp"

namespace mlnum::meanfield {

struct RademacherOptions {
    int trials = 24;      // sign-vector draws
    int starts = 12;      // multi-start count for the inner maximizer
    int steps = 60;       // projected gradient-ascent steps per start
    double step_size = 0.25;
};

struct RademacherResult {
    double estimate = 0.0;
    double bound = 0.0;       // 2 Q sqrt(2 ln(2d) / n)
    long budget_used = 0;     // total inner ascent steps
};

// Empirical Rademacher complexity of the relu ball {f : path-type norm <= Q}
// on the dataset X (n x d). The inner sup reduces by homogeneity to single
// neurons Q s sigma(w . x) with |s| = 1, ||w||_1 = 1, approximated by
// multi-start projected gradient ascent; the estimate is a lower bound on the
// true complexity, so only <=-comparisons against theory are meaningful.
RademacherResult rademacher_barron_ball(std::span<const double> X, int n, int d, double Q,
                                        const RademacherOptions& opt, std::uint64_t seed);

// Exact estimate for a finite hypothesis class (sup by enumeration).
double rademacher_finite(const std::vector<TargetFn>& fns, std::span<const double> X, int n,
                         int d, int trials, std::uint64_t seed);

}  // namespace mlnum::meanfield
