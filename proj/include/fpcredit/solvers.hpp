#pragma once

#include <functional>
#include <vector>

namespace fpcredit {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0;  // final bracket
    double bracket_hi = 0.0;
    bool bracketed = false;  // sign change found on the initial interval
    bool converged = false;
};

/// Brent's method (inverse quadratic / secant steps safeguarded by bisection) on [lo, hi].
/// Stops when |f| <= f_tol or the bracket collapses to machine precision.
RootResult find_root(const std::function<double(double)>& f, double lo, double hi, double f_tol,
                     int max_iterations = 300);

struct MinimizeResult {
    std::vector<double> x;
    double fx = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead simplex search. Converges when the spread of objective values over the
/// simplex drops below f_tol or every vertex is within x_tol of the best one.
MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> start, double initial_step, double f_tol,
                           int max_evaluations = 20000, double x_tol = 1e-10);

}  // namespace fpcredit
