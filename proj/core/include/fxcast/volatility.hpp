#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fxcast/dataio.hpp"
#include "fxcast/stattests.hpp"

namespace fxcast {

enum class GarchFamily { Garch, Egarch };

std::string to_string(GarchFamily f);
GarchFamily garch_family_from_string(const std::string& s);

struct GarchSpec {
    GarchFamily family = GarchFamily::Garch;
    int p = 1;  // lags of h
    int q = 1;  // lags of eps^2
    std::vector<std::string> mean_regressors;
    bool intercept = true;
    std::string target;
    /// Columns first-differenced before fitting (the I(1) pathway); rows are
    /// realigned by dropping the first observation.
    std::vector<std::string> difference_columns;
    /// Uses the paper-literal eps/h leverage denominator instead of the
    /// standardized eps/sqrt(h).
    bool literal_egarch_leverage = false;

    int mean_coefficient_count() const;
    void validate() const;
    nlohmann::json to_json() const;
    static GarchSpec from_json(const nlohmann::json& j);
};

struct GarchParams {
    Eigen::VectorXd mean;   // [intercept?, regressor betas]
    double omega = 0.0;
    Eigen::VectorXd alpha;  // size q
    Eigen::VectorXd beta;   // size p
    Eigen::VectorXd gamma;  // size q, EGARCH only (empty for GARCH)

    double persistence() const { return alpha.sum() + beta.sum(); }
    void validate(GarchFamily family) const;
};

/// h_t = omega + sum_i alpha_i eps^2_{t-i} + sum_j beta_j h_{t-j}; pre-sample
/// eps^2 and h seeded with h0.
std::vector<double> garch_filter(const GarchParams& params, std::span<const double> eps,
                                 double h0);

/// log h_t = omega + sum_j beta_j log h_{t-j}
///         + sum_i (alpha_i |z_{t-i}| + gamma_i z_{t-i}),  z = eps / sqrt(h).
/// Pre-sample log h is log h0 and pre-sample z is 0. log h is clamped to
/// +-700 so h stays finite and strictly positive.
std::vector<double> egarch_filter(const GarchParams& params, std::span<const double> eps,
                                  double h0, bool literal_leverage = false);

/// Gaussian quasi log-likelihood of the mean + variance model on the frame;
/// the pre-sample variance is the mean square of the implied residuals.
/// Throws numerical_error on a non-finite result.
double gaussian_loglik(const GarchSpec& spec, const GarchParams& params,
                       const TimeSeriesFrame& frame);

struct InformationCriteria {
    double aic = 0.0;
    double sic = 0.0;
    double hqc = 0.0;
};

/// Per-observation convention by default: AIC = (-2 l + 2k)/n and so on;
/// per_observation = false gives the total form.
InformationCriteria information_criteria(double loglik, int k, int n,
                                         bool per_observation = true);

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    std::string stars;
};

struct GarchFit {
    GarchSpec spec;
    GarchParams params;
    std::vector<double> h;              // fitted conditional variance path
    std::vector<double> residuals;      // eps_t from the mean equation
    std::vector<double> std_residuals;  // z_t = eps_t / sqrt(h_t)
    double h0 = 1.0;                    // pre-sample variance used by the filter
    double loglik = 0.0;
    double aic = 0.0, sic = 0.0, hqc = 0.0;
    double r2 = 0.0, adj_r2 = 0.0;
    std::vector<Coefficient> coefficients;
    bool inference_reliable = true;

    nlohmann::json to_json() const;
};

/// Quasi-maximum-likelihood fit: simplex warm start from OLS-mean +
/// moment-matched variance initials, BFGS polish on the transformed
/// parameters, up to five seeded restarts. Throws numerical_error when no
/// restart produces a finite optimum.
GarchFit fit_garch(const GarchSpec& spec, const TimeSeriesFrame& frame,
                   std::uint64_t restart_seed = 1);

/// R^2 and adjusted R^2 of the mean equation at the fitted coefficients.
std::pair<double, double> fit_statistics(const GarchFit& fit, const TimeSeriesFrame& frame);

struct GarchForecast {
    std::vector<double> mean;
    std::vector<double> variance;
};

/// Mean forecasts from the supplied future regressor rows; variance by
/// iterating the filter with E[eps^2_{t+j}] = h_{t+j} (and E|z| = sqrt(2/pi),
/// E z = 0 for unobserved EGARCH shocks).
GarchForecast forecast(const GarchFit& fit, const TimeSeriesFrame& future, int horizon);

struct ResidualDiagnostics {
    DescriptiveStats stats;
    TestResult jarque_bera;
};

ResidualDiagnostics residual_diagnostics(const GarchFit& fit);

// ---------------------------------------------------------------------------
// Transformed (unconstrained) parameter space; exposed for the
// local-optimality checks.
// ---------------------------------------------------------------------------

Eigen::VectorXd to_unconstrained(const GarchSpec& spec, const GarchParams& params);
GarchParams from_unconstrained(const GarchSpec& spec, const Eigen::VectorXd& theta);

/// Log-likelihood evaluated with the fit's stored pre-sample variance.
double loglik_at(const GarchFit& fit, const GarchParams& params, const TimeSeriesFrame& frame);

}  // namespace fxcast
