#pragma once

#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace fxcast {

/// Deterministic terms included in a unit-root regression.
enum class TrendSpec { None, Constant, ConstantTrend };

std::string to_string(TrendSpec spec);
TrendSpec trend_spec_from_string(const std::string& s);

/// Outcome of any hypothesis test in the battery.
struct TestResult {
    std::string test;
    double statistic = 0.0;
    double p_value = 1.0;
    double level = 0.05;
    bool reject = false;  // decision at `level`

    std::optional<int> lags;        // nuisance: lag order, when applicable
    std::optional<int> bandwidth;   // nuisance: kernel bandwidth, when applicable
    std::optional<double> df;       // degrees of freedom, when applicable
    std::optional<TrendSpec> trend;

    std::string decision() const { return reject ? "reject" : "fail_to_reject"; }
    std::string stars() const;
    nlohmann::json to_json() const;
};

// ===========================================================================
// Normality
// ===========================================================================

/// JB = n/6 (S^2 + (K-3)^2/4); p-value from the chi-square(2) upper tail.
TestResult jarque_bera(std::span<const double> series, double level = 0.05);

// ===========================================================================
// Unit roots
// ===========================================================================

/// The fitted Dickey-Fuller regression. Coefficient order:
/// [constant?, trend?, gamma, delta_1 .. delta_p].
struct AdfRegression {
    Eigen::VectorXd coef;
    Eigen::VectorXd std_err;
    Eigen::VectorXd residuals;
    int lag_order = 0;    // number of lagged-difference terms included
    int gamma_index = 0;  // position of gamma within coef
};

enum class LagSelection { Fixed, InformationCriterion };

struct AdfResult {
    TestResult summary;
    AdfRegression regression;
};

/// Augmented Dickey-Fuller t-test of H0: gamma = 0 against gamma < 0.
/// max_lag < 0 selects the Schwert rule floor(12 (n/100)^{1/4}); with
/// InformationCriterion the lag order minimizing AIC on a common sample is
/// used, with Fixed the regression uses exactly max_lag lagged differences.
AdfResult adf_test(std::span<const double> series, TrendSpec trend = TrendSpec::Constant,
                   int max_lag = -1, LagSelection selection = LagSelection::InformationCriterion,
                   double level = 0.05);

/// Phillips-Perron Z_tau test: the Dickey-Fuller regression without lagged
/// differences, t-ratio corrected through the Newey-West long-run variance.
/// bandwidth < 0 selects floor(4 (n/100)^{2/9}).
TestResult pp_test(std::span<const double> series, TrendSpec trend = TrendSpec::Constant,
                   int bandwidth = -1, double level = 0.05);

/// Finite-sample Dickey-Fuller critical value from the embedded
/// response-surface table; level must be one of 0.01, 0.05, 0.10.
double adf_critical_value(TrendSpec spec, double level, int nobs);

// ===========================================================================
// ARCH effects
// ===========================================================================

struct ArchLmResult {
    TestResult f_test;   // joint F on the lagged squared residuals
    TestResult lm_test;  // n R^2 chi-square form
};

/// Regresses eps_t^2 on a constant and eps^2_{t-1..t-lags}.
ArchLmResult arch_lm_test(std::span<const double> residuals, int lags, double level = 0.05);

// ===========================================================================
// Long-run variance
// ===========================================================================

/// Bartlett-kernel long-run variance. Bandwidth 0 degenerates to the biased
/// (1/n) sample variance.
double newey_west_lrv(std::span<const double> series, int bandwidth, bool demean = true);

}  // namespace fxcast
