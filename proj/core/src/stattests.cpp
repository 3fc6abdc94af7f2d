#include "fxcast/stattests.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fxcast/common.hpp"
#include "fxcast/dataio.hpp"
#include "fxcast/distributions.hpp"
#include "fxcast/ols.hpp"

namespace fxcast {

std::string to_string(TrendSpec spec) {
    switch (spec) {
        case TrendSpec::None: return "none";
        case TrendSpec::Constant: return "constant";
        case TrendSpec::ConstantTrend: return "constant+trend";
    }
    return "constant";
}

TrendSpec trend_spec_from_string(const std::string& s) {
    if (s == "none" || s == "n") return TrendSpec::None;
    if (s == "constant" || s == "c") return TrendSpec::Constant;
    if (s == "constant+trend" || s == "ct") return TrendSpec::ConstantTrend;
    throw std::invalid_argument("unknown trend spec '" + s + "'");
}

std::string TestResult::stars() const { return significance_stars(p_value); }

nlohmann::json TestResult::to_json() const {
    nlohmann::json j{{"test", test},
                     {"statistic", statistic},
                     {"p_value", p_value},
                     {"level", level},
                     {"decision", decision()}};
    nlohmann::json nuisance;
    if (lags) nuisance["lags"] = *lags;
    if (bandwidth) nuisance["bandwidth"] = *bandwidth;
    if (df) nuisance["df"] = *df;
    j["nuisance"] = nuisance;
    j["spec"] = trend ? nlohmann::json(to_string(*trend)) : nlohmann::json(nullptr);
    return j;
}

// ===========================================================================
// Jarque-Bera
// ===========================================================================

TestResult jarque_bera(std::span<const double> series, double level) {
    const std::size_t n = series.size();
    if (n < 8) throw std::invalid_argument("jarque_bera needs n >= 8");
    const DescriptiveStats d = describe(series);  // throws on zero variance
    const double s = d.skewness;
    const double k = d.kurtosis;
    TestResult r;
    r.test = "jarque_bera";
    r.statistic = static_cast<double>(n) / 6.0 * (s * s + (k - 3.0) * (k - 3.0) / 4.0);
    r.p_value = chi_squared_sf(r.statistic, 2.0);
    r.level = level;
    r.reject = r.p_value < level;
    return r;
}

// ===========================================================================
// Dickey-Fuller p-values and critical values (MacKinnon response surfaces)
// ===========================================================================

namespace {

struct PvalSurface {
    double tau_min, tau_max, tau_star;
    double small_p[3];  // quadratic in tau, used for tau <= tau_star
    double large_p[4];  // cubic in tau, used for tau > tau_star
};

// MacKinnon (1994) asymptotic p-value surfaces for the DF t distribution.
constexpr PvalSurface kPvalNone = {
    -19.04, 1.51, -1.04, {0.6344, 1.2378, 0.032496}, {0.4797, 0.93557, -0.06999, 0.033066}};
constexpr PvalSurface kPvalConst = {
    -18.83, 2.74, -1.61, {2.1659, 1.4412, 0.038269}, {1.7339, 0.93202, -0.12745, -0.010368}};
constexpr PvalSurface kPvalTrend = {
    -16.18, 0.70, -2.89, {3.2512, 1.6047, 0.049588}, {2.5261, 0.61654, -0.37956, -0.060285}};

const PvalSurface& pval_surface(TrendSpec spec) {
    switch (spec) {
        case TrendSpec::None: return kPvalNone;
        case TrendSpec::Constant: return kPvalConst;
        case TrendSpec::ConstantTrend: return kPvalTrend;
    }
    return kPvalConst;
}

double df_p_value(double tau, TrendSpec spec) {
    const PvalSurface& s = pval_surface(spec);
    if (tau <= s.tau_min) return 1e-16;
    if (tau >= s.tau_max) return 1.0 - 1e-16;
    double z;
    if (tau <= s.tau_star) {
        z = s.small_p[0] + tau * (s.small_p[1] + tau * s.small_p[2]);
    } else {
        z = s.large_p[0] + tau * (s.large_p[1] + tau * (s.large_p[2] + tau * s.large_p[3]));
    }
    return normal_cdf(z);
}

struct CritSurface {
    double b_inf, b1, b2, b3;
};

// MacKinnon (2010) finite-sample critical-value response surfaces,
// CV(T) = b_inf + b1/T + b2/T^2 + b3/T^3, one row per (spec, level).
constexpr CritSurface kCritNone[3] = {{-2.56574, -2.2358, -3.627, 0.0},
                                      {-1.94100, -0.2686, -3.365, 31.223},
                                      {-1.61682, 0.2656, -2.714, 17.296}};
constexpr CritSurface kCritConst[3] = {{-3.43035, -6.5393, -16.786, -79.433},
                                       {-2.86154, -2.8903, -4.234, -40.040},
                                       {-2.56677, -1.5384, -2.809, 0.0}};
constexpr CritSurface kCritTrend[3] = {{-3.95877, -9.0531, -28.428, -134.155},
                                       {-3.41049, -4.3904, -9.036, -45.374},
                                       {-3.12705, -2.5856, -3.925, -22.380}};

}  // namespace

double adf_critical_value(TrendSpec spec, double level, int nobs) {
    int idx;
    if (level == 0.01) {
        idx = 0;
    } else if (level == 0.05) {
        idx = 1;
    } else if (level == 0.10) {
        idx = 2;
    } else {
        throw std::invalid_argument("critical values tabulated at 1/5/10% only");
    }
    const CritSurface* table = spec == TrendSpec::None      ? kCritNone
                               : spec == TrendSpec::Constant ? kCritConst
                                                             : kCritTrend;
    const CritSurface& c = table[idx];
    const double t = static_cast<double>(nobs);
    return c.b_inf + c.b1 / t + c.b2 / (t * t) + c.b3 / (t * t * t);
}

// ===========================================================================
// ADF
// ===========================================================================

namespace {

// Builds the Dickey-Fuller design for lag order p over observations
// s = start..n-1 of the original series: regress dy_s on
// [const?, trend?, y_{s-1}, dy_{s-1}..dy_{s-p}].
void build_df_design(std::span<const double> y, TrendSpec trend, int p, std::size_t start,
                     Eigen::MatrixXd& X, Eigen::VectorXd& target) {
    const std::size_t n = y.size();
    const std::size_t rows = n - start;
    const int det = trend == TrendSpec::None ? 0 : (trend == TrendSpec::Constant ? 1 : 2);
    X.resize(static_cast<long>(rows), det + 1 + p);
    target.resize(static_cast<long>(rows));
    for (std::size_t s = start; s < n; ++s) {
        const long r = static_cast<long>(s - start);
        target(r) = y[s] - y[s - 1];
        long c = 0;
        if (det >= 1) X(r, c++) = 1.0;
        if (det == 2) X(r, c++) = static_cast<double>(s);
        X(r, c++) = y[s - 1];
        for (int j = 1; j <= p; ++j) {
            X(r, c++) = y[s - j] - y[s - j - 1];
        }
    }
}

int schwert_max_lag(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

}  // namespace

AdfResult adf_test(std::span<const double> series, TrendSpec trend, int max_lag,
                   LagSelection selection, double level) {
    const std::size_t n = series.size();
    if (max_lag < 0) max_lag = schwert_max_lag(n);
    if (n < static_cast<std::size_t>(25 + max_lag)) {
        throw std::invalid_argument("adf_test: insufficient observations");
    }

    int lag = max_lag;
    if (selection == LagSelection::InformationCriterion && max_lag > 0) {
        // Candidate lags compared on the common sample fixed by max_lag.
        const std::size_t start = static_cast<std::size_t>(max_lag) + 1;
        double best_aic = std::numeric_limits<double>::infinity();
        Eigen::MatrixXd X;
        Eigen::VectorXd target;
        for (int p = 0; p <= max_lag; ++p) {
            build_df_design(series, trend, p, start, X, target);
            const OlsFit fit = ols(X, target);
            const double nobs = static_cast<double>(fit.n);
            const double aic = nobs * std::log(fit.rss / nobs) + 2.0 * static_cast<double>(fit.k);
            if (aic < best_aic) {
                best_aic = aic;
                lag = p;
            }
        }
    }

    Eigen::MatrixXd X;
    Eigen::VectorXd target;
    build_df_design(series, trend, lag, static_cast<std::size_t>(lag) + 1, X, target);
    const OlsFit fit = ols(X, target);

    const int det = trend == TrendSpec::None ? 0 : (trend == TrendSpec::Constant ? 1 : 2);
    const int gamma_index = det;
    const double tau = fit.coef(gamma_index) / fit.std_err(gamma_index);

    AdfResult out;
    out.summary.test = "adf";
    out.summary.statistic = tau;
    out.summary.p_value = df_p_value(tau, trend);
    out.summary.level = level;
    out.summary.reject = out.summary.p_value < level;
    out.summary.lags = lag;
    out.summary.trend = trend;
    out.regression.coef = fit.coef;
    out.regression.std_err = fit.std_err;
    out.regression.residuals = fit.residuals;
    out.regression.lag_order = lag;
    out.regression.gamma_index = gamma_index;
    return out;
}

// ===========================================================================
// Phillips-Perron
// ===========================================================================

TestResult pp_test(std::span<const double> series, TrendSpec trend, int bandwidth, double level) {
    const std::size_t n = series.size();
    if (n < 25) throw std::invalid_argument("pp_test: insufficient observations");
    if (bandwidth < 0) {
        bandwidth = static_cast<int>(
            std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
    }

    Eigen::MatrixXd X;
    Eigen::VectorXd target;
    build_df_design(series, trend, 0, 1, X, target);
    const OlsFit fit = ols(X, target);

    const int det = trend == TrendSpec::None ? 0 : (trend == TrendSpec::Constant ? 1 : 2);
    const double se_gamma = fit.std_err(det);
    const double tau = fit.coef(det) / se_gamma;

    const double T = static_cast<double>(fit.n);
    const double gamma0 = fit.rss / T;
    const double s = std::sqrt(fit.sigma2);

    // Bartlett long-run variance of the regression residuals (no demeaning;
    // they are already orthogonal to the deterministic terms).
    std::vector<double> resid(fit.residuals.data(), fit.residuals.data() + fit.residuals.size());
    const double lam2 = newey_west_lrv(resid, bandwidth, /*demean=*/false);
    if (!(lam2 > 0.0)) throw numerical_error("pp_test: degenerate long-run variance");

    const double z_tau = std::sqrt(gamma0 / lam2) * tau -
                         (lam2 - gamma0) * T * se_gamma / (2.0 * std::sqrt(lam2) * s);

    TestResult r;
    r.test = "pp";
    r.statistic = z_tau;
    r.p_value = df_p_value(z_tau, trend);
    r.level = level;
    r.reject = r.p_value < level;
    r.bandwidth = bandwidth;
    r.trend = trend;
    return r;
}

// ===========================================================================
// ARCH-LM
// ===========================================================================

ArchLmResult arch_lm_test(std::span<const double> residuals, int lags, double level) {
    const std::size_t n = residuals.size();
    if (lags < 1) throw std::invalid_argument("arch_lm_test: lags >= 1 required");
    if (n < static_cast<std::size_t>(lags + 10)) {
        throw std::invalid_argument("arch_lm_test: insufficient observations");
    }

    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = residuals[i] * residuals[i];

    const std::size_t rows = n - static_cast<std::size_t>(lags);
    Eigen::MatrixXd X(static_cast<long>(rows), lags + 1);
    Eigen::VectorXd y(static_cast<long>(rows));
    for (std::size_t t = static_cast<std::size_t>(lags); t < n; ++t) {
        const long r = static_cast<long>(t - static_cast<std::size_t>(lags));
        y(r) = sq[t];
        X(r, 0) = 1.0;
        for (int j = 1; j <= lags; ++j) X(r, j) = sq[t - static_cast<std::size_t>(j)];
    }

    const double mean = y.mean();
    const double rss_restricted = (y.array() - mean).square().sum();
    if (rss_restricted <= 0.0) throw numerical_error("arch_lm_test: degenerate residuals");

    const OlsFit fit = ols(X, y);
    const double T = static_cast<double>(rows);
    const double df2 = T - static_cast<double>(lags) - 1.0;
    const double f_stat =
        ((rss_restricted - fit.rss) / static_cast<double>(lags)) / (fit.rss / df2);
    const double r2 = 1.0 - fit.rss / rss_restricted;

    ArchLmResult out;
    out.f_test.test = "arch_lm_f";
    out.f_test.statistic = f_stat;
    out.f_test.p_value = f_sf(f_stat, static_cast<double>(lags), df2);
    out.f_test.level = level;
    out.f_test.reject = out.f_test.p_value < level;
    out.f_test.lags = lags;

    out.lm_test.test = "arch_lm_nr2";
    out.lm_test.statistic = T * r2;
    out.lm_test.p_value = chi_squared_sf(out.lm_test.statistic, static_cast<double>(lags));
    out.lm_test.level = level;
    out.lm_test.reject = out.lm_test.p_value < level;
    out.lm_test.lags = lags;
    return out;
}

// ===========================================================================
// Newey-West
// ===========================================================================

double newey_west_lrv(std::span<const double> series, int bandwidth, bool demean) {
    if (bandwidth < 0) throw std::invalid_argument("newey_west_lrv: negative bandwidth");
    const std::size_t n = series.size();
    if (n < static_cast<std::size_t>(bandwidth + 2)) {
        throw std::invalid_argument("newey_west_lrv: n >= bandwidth + 2 required");
    }
    double mu = 0.0;
    if (demean) {
        for (double x : series) mu += x;
        mu /= static_cast<double>(n);
    }
    const double nn = static_cast<double>(n);
    double lrv = 0.0;
    for (int j = 0; j <= bandwidth; ++j) {
        double acov = 0.0;
        for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t) {
            acov += (series[t] - mu) * (series[t - static_cast<std::size_t>(j)] - mu);
        }
        acov /= nn;
        const double weight = 1.0 - static_cast<double>(j) / (static_cast<double>(bandwidth) + 1.0);
        lrv += (j == 0 ? 1.0 : 2.0 * weight) * acov;
    }
    return std::max(lrv, 0.0);
}

}  // namespace fxcast
