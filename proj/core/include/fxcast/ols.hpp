#pragma once

#include <Eigen/Dense>

namespace fxcast {

/// Ordinary least squares fit of y on the columns of X (X must already
/// contain the intercept column if one is wanted).
struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd std_err;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    double rss = 0.0;     // residual sum of squares
    double sigma2 = 0.0;  // rss / (n - k)
    long n = 0;
    long k = 0;

    double tss_centered(const Eigen::VectorXd& y) const;
    double r_squared(const Eigen::VectorXd& y) const;
    double adj_r_squared(const Eigen::VectorXd& y) const;
};

/// Throws numerical_error if X is rank deficient or n <= k.
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

}  // namespace fxcast
