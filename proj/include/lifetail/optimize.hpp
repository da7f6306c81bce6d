#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace lifetail {

/// Raised when an iterative procedure exhausts its budget.
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SimplexOptions {
    double diameter_tol = 1e-8; // max vertex distance to the best vertex
    double f_tol = 1e-10;       // spread of function values across the simplex
    std::size_t max_evals = 10000;
};

struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    std::size_t evals = 0;
    bool converged = false;
};

/// Nelder-Mead minimization. Objective values of +infinity are legal and act
/// as rejected moves, so hard feasibility barriers work out of the box. The
/// start point itself must evaluate finite.
SimplexResult minimize_simplex(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> start,
                               std::span<const double> step,
                               const SimplexOptions& options = {});

/// Central-difference Hessian with per-coordinate step
/// rel_step * max(|x_i|, 1). Row-major, symmetric by construction; non-finite
/// entries appear when f is infinite near x (the caller decides what that means).
std::vector<double> hessian_fd(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> x,
                               double rel_step = 1e-4);

/// Central-difference gradient with per-coordinate step rel_step * max(|x_i|, 1).
std::vector<double> gradient_fd(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x,
                                double rel_step = 1e-6);

} // namespace lifetail
