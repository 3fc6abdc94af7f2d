#pragma once

#include <functional>

#include <Eigen/Dense>

namespace fxcast {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

struct OptimResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    int max_iter = 2000;
    double f_tol = 1e-10;
    double x_tol = 1e-9;
    double init_step = 0.1;
};

/// Derivative-free simplex minimization. Non-finite objective values are
/// treated as +inf, so hard feasibility rejections are acceptable.
OptimResult nelder_mead(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                        const NelderMeadOptions& opts = {});

struct BfgsOptions {
    int max_iter = 300;
    double grad_tol = 1e-7;
    double step_tol = 1e-12;
    double fd_step = 1e-6;  // central-difference step for the gradient
};

/// Quasi-Newton polish with a numerical central-difference gradient and a
/// backtracking Armijo line search.
OptimResult bfgs_minimize(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                          const BfgsOptions& opts = {});

/// Central-difference gradient used by bfgs_minimize; exposed for tests.
Eigen::VectorXd numerical_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x, double step);

/// Central-difference Hessian with per-coordinate steps
/// step_scale * max(1, |x_i|).
Eigen::MatrixXd numerical_hessian(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                  double step_scale = 1e-4);

}  // namespace fxcast
