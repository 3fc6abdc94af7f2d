#include "fxcast/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace fxcast {

namespace {

double safe_eval(const ObjectiveFn& f, const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

OptimResult nelder_mead(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                        const NelderMeadOptions& opts) {
    const long n = x0.size();
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n) + 1, x0);
    std::vector<double> values(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i < n; ++i) {
        double step = opts.init_step * std::max(1.0, std::fabs(x0(i)));
        simplex[static_cast<std::size_t>(i) + 1](i) += step;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = safe_eval(f, simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    OptimResult result;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        // Convergence on both value spread and simplex size.
        double size = 0.0;
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            size = std::max(size, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
        }
        if (std::isfinite(values[worst]) &&
            std::fabs(values[worst] - values[best]) < opts.f_tol && size < opts.x_tol) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i != worst) centroid += simplex[i];
        }
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + alpha * (centroid - simplex[worst]);
        const double f_reflected = safe_eval(f, reflected);

        if (f_reflected < values[best]) {
            const Eigen::VectorXd expanded = centroid + gamma * (centroid - simplex[worst]);
            const double f_expanded = safe_eval(f, expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if (f_reflected < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            const Eigen::VectorXd contracted = centroid + rho * (simplex[worst] - centroid);
            const double f_contracted = safe_eval(f, contracted);
            if (f_contracted < values[worst]) {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                for (std::size_t i = 0; i < simplex.size(); ++i) {
                    if (i == best) continue;
                    simplex[i] = simplex[best] + sigma * (simplex[i] - simplex[best]);
                    values[i] = safe_eval(f, simplex[i]);
                }
            }
        }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
    result.value = *best_it;
    result.iterations = iter;
    return result;
}

Eigen::VectorXd numerical_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (long i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::fabs(x(i)));
        probe(i) = x(i) + h;
        const double fp = safe_eval(f, probe);
        probe(i) = x(i) - h;
        const double fm = safe_eval(f, probe);
        probe(i) = x(i);
        grad(i) = (fp - fm) / (2.0 * h);
    }
    return grad;
}

Eigen::MatrixXd numerical_hessian(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                  double step_scale) {
    const long n = x.size();
    Eigen::VectorXd h(n);
    for (long i = 0; i < n; ++i) h(i) = step_scale * std::max(1.0, std::fabs(x(i)));

    Eigen::MatrixXd hess(n, n);
    const double f0 = safe_eval(f, x);
    Eigen::VectorXd probe = x;
    for (long i = 0; i < n; ++i) {
        // Diagonal: (f(x+h) - 2 f(x) + f(x-h)) / h^2.
        probe(i) = x(i) + h(i);
        const double fp = safe_eval(f, probe);
        probe(i) = x(i) - h(i);
        const double fm = safe_eval(f, probe);
        probe(i) = x(i);
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
        for (long j = i + 1; j < n; ++j) {
            probe(i) = x(i) + h(i);
            probe(j) = x(j) + h(j);
            const double fpp = safe_eval(f, probe);
            probe(j) = x(j) - h(j);
            const double fpm = safe_eval(f, probe);
            probe(i) = x(i) - h(i);
            probe(j) = x(j) + h(j);
            const double fmp = safe_eval(f, probe);
            probe(j) = x(j) - h(j);
            const double fmm = safe_eval(f, probe);
            probe(i) = x(i);
            probe(j) = x(j);
            hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h(i) * h(j));
        }
    }
    return hess;
}

OptimResult bfgs_minimize(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                          const BfgsOptions& opts) {
    const long n = x0.size();
    Eigen::VectorXd x = x0;
    double fx = safe_eval(f, x);
    Eigen::VectorXd grad = numerical_gradient(f, x, opts.fd_step);
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);

    OptimResult result;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        if (grad.norm() < opts.grad_tol) {
            result.converged = true;
            break;
        }
        Eigen::VectorXd dir = -(h_inv * grad);
        double slope = grad.dot(dir);
        if (slope >= 0.0) {  // reset on loss of descent
            h_inv.setIdentity();
            dir = -grad;
            slope = grad.dot(dir);
        }

        double alpha = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            x_new = x + alpha * dir;
            f_new = safe_eval(f, x_new);
            if (f_new <= fx + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted || (x_new - x).norm() < opts.step_tol) {
            result.converged = grad.norm() < 1e-3;
            break;
        }

        const Eigen::VectorXd grad_new = numerical_gradient(f, x_new, opts.fd_step);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd yv = grad_new - grad;
        const double sy = s.dot(yv);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            h_inv = (eye - rho * s * yv.transpose()) * h_inv * (eye - rho * yv * s.transpose()) +
                    rho * s * s.transpose();
        }
        x = x_new;
        fx = f_new;
        grad = grad_new;
    }

    result.x = x;
    result.value = fx;
    result.iterations = iter;
    return result;
}

}  // namespace fxcast
