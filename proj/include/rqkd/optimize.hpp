#pragma once

#include <functional>
#include <vector>

namespace rqkd::opt {

struct NelderMeadOptions {
    double initial_step = 0.02;
    double x_tol = 1e-9;
    double f_tol = 1e-13;
    int max_iterations = 2000;
};

struct MinimizeResult {
    std::vector<double> x;
    double value;
    int iterations;
};

/// Derivative-free simplex minimizer. The objective may return +inf to mark
/// points outside the admissible region. Deterministic for a given start.
MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> start, const NelderMeadOptions& opts = {});

struct ScalarResult {
    double x;
    double value;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
ScalarResult golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                double tol);

}  // namespace rqkd::opt
