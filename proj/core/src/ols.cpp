#include "fxcast/ols.hpp"

#include <cmath>

#include "fxcast/common.hpp"

namespace fxcast {

double OlsFit::tss_centered(const Eigen::VectorXd& y) const {
    const double mean = y.mean();
    return (y.array() - mean).square().sum();
}

double OlsFit::r_squared(const Eigen::VectorXd& y) const {
    const double tss = tss_centered(y);
    if (tss <= 0.0) throw numerical_error("r_squared: zero target variance");
    return 1.0 - rss / tss;
}

double OlsFit::adj_r_squared(const Eigen::VectorXd& y) const {
    const double r2 = r_squared(y);
    if (n - k <= 0) throw numerical_error("adj_r_squared: no residual degrees of freedom");
    // X already contains the intercept column, so n - k here equals the
    // textbook n - k' - 1 with k' regressors beside the intercept.
    return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - k);
}

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const long n = X.rows();
    const long k = X.cols();
    if (y.size() != n) throw std::invalid_argument("ols: X and y row counts differ");
    if (n <= k) throw numerical_error("ols: more regressors than observations");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) throw numerical_error("ols: singular regressor matrix");

    OlsFit fit;
    fit.n = n;
    fit.k = k;
    fit.coef = qr.solve(y);
    fit.fitted = X * fit.coef;
    fit.residuals = y - fit.fitted;
    fit.rss = fit.residuals.squaredNorm();
    fit.sigma2 = fit.rss / static_cast<double>(n - k);

    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    fit.std_err = (fit.sigma2 * xtx_inv.diagonal().array()).sqrt();
    return fit;
}

}  // namespace fxcast
