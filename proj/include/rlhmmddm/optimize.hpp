#pragma once
// Quasi-Newton minimisation (BFGS on the inverse Hessian, Armijo
// backtracking) for the small unconstrained problems of the M-steps.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rlhmmddm::opt {

/// Returns f(x); when grad is non-empty it must also be filled with df/dx.
/// Non-finite values are treated as +infinity by the line search.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BfgsOptions {
    int max_iter = 100;
    double grad_tol = 1e-8;     // stop when ||g||_inf <= grad_tol * (1 + |f|)
    double f_tol = 1e-14;       // or when a step gains less than f_tol * (1 + |f|)
    double max_step = 3.0;      // cap on ||step||_inf per iteration
    double armijo = 1e-4;
    int max_backtracks = 50;
    bool record_trace = false;
};

struct BfgsResult {
    std::vector<double> x;
    double f = 0.0;
    double f_initial = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::vector<double> inv_hessian;  // row-major n x n, reusable as a warm start
    std::vector<double> trace;        // f after each iteration (record_trace)
    std::string message;
};

/// Minimises f from x0. h0, when non-empty, is the initial inverse Hessian.
BfgsResult bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opts = {},
                std::span<const double> h0 = {});

/// Wraps a value-only function with a central-difference gradient.
Objective with_central_differences(std::function<double(std::span<const double>)> f, double step = 1e-6);

}  // namespace rlhmmddm::opt
