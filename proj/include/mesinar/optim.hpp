#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace mesinar::optim {

/// Objective returning f(x); fills *grad with the gradient when grad != nullptr.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct Options {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;  ///< on the infinity norm of the gradient
    double max_step = 4.0;             ///< cap on the Euclidean length of a trial step
    // A line search that cannot decrease f any further still counts as converged
    // if the gradient is at most this large.
    double stall_gradient_tolerance = 1e-3;
};

struct Result {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd grad;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
};

/// Unconstrained BFGS with a strong-Wolfe line search.
Result minimize_bfgs(const Objective& objective, const Eigen::VectorXd& x0, const Options& options = {});

}  // namespace mesinar::optim
