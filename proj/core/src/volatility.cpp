#include "fxcast/volatility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fxcast/common.hpp"
#include "fxcast/distributions.hpp"
#include "fxcast/ols.hpp"
#include "fxcast/optim.hpp"
#include "fxcast/rng.hpp"

namespace fxcast {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kSimplexMargin = 1e-6;  // keeps persistence strictly below 1
constexpr double kLogHClamp = 700.0;
constexpr double kMinH0 = 1e-12;

}  // namespace

std::string to_string(GarchFamily f) { return f == GarchFamily::Garch ? "GARCH" : "EGARCH"; }

GarchFamily garch_family_from_string(const std::string& s) {
    if (s == "GARCH" || s == "garch") return GarchFamily::Garch;
    if (s == "EGARCH" || s == "egarch") return GarchFamily::Egarch;
    throw std::invalid_argument("unknown GARCH family '" + s + "'");
}

int GarchSpec::mean_coefficient_count() const {
    return static_cast<int>(mean_regressors.size()) + (intercept ? 1 : 0);
}

void GarchSpec::validate() const {
    if (p < 0) throw std::invalid_argument("garch spec: p >= 0 required");
    if (q < 1) throw std::invalid_argument("garch spec: q >= 1 required");
    if (target.empty()) throw std::invalid_argument("garch spec: target column required");
}

nlohmann::json GarchSpec::to_json() const {
    return {{"family", to_string(family)},
            {"p", p},
            {"q", q},
            {"mean_regressors", mean_regressors},
            {"intercept", intercept},
            {"target", target},
            {"difference_columns", difference_columns},
            {"literal_egarch_leverage", literal_egarch_leverage}};
}

GarchSpec GarchSpec::from_json(const nlohmann::json& j) {
    GarchSpec spec;
    spec.family = garch_family_from_string(j.at("family").get<std::string>());
    spec.p = j.at("p").get<int>();
    spec.q = j.at("q").get<int>();
    spec.mean_regressors = j.value("mean_regressors", std::vector<std::string>{});
    spec.intercept = j.value("intercept", true);
    spec.target = j.at("target").get<std::string>();
    spec.difference_columns = j.value("difference_columns", std::vector<std::string>{});
    spec.literal_egarch_leverage = j.value("literal_egarch_leverage", false);
    spec.validate();
    return spec;
}

void GarchParams::validate(GarchFamily family) const {
    if (family == GarchFamily::Garch) {
        if (!(omega > 0.0)) throw std::invalid_argument("garch params: omega > 0 required");
        if ((alpha.array() < 0.0).any() || (beta.array() < 0.0).any()) {
            throw std::invalid_argument("garch params: alpha, beta >= 0 required");
        }
        if (!(persistence() < 1.0)) {
            throw std::invalid_argument("garch params: persistence must be < 1");
        }
    } else {
        if (beta.cwiseAbs().sum() >= 1.0) {
            throw std::invalid_argument("egarch params: sum |beta| < 1 required");
        }
    }
}

// ===========================================================================
// Filters
// ===========================================================================

std::vector<double> garch_filter(const GarchParams& params, std::span<const double> eps,
                                 double h0) {
    if (!(h0 > 0.0)) throw std::invalid_argument("garch_filter: h0 > 0 required");
    params.validate(GarchFamily::Garch);
    const int q = static_cast<int>(params.alpha.size());
    const int p = static_cast<int>(params.beta.size());
    std::vector<double> h(eps.size());
    for (std::size_t t = 0; t < eps.size(); ++t) {
        double value = params.omega;
        for (int i = 1; i <= q; ++i) {
            const double e2 = (static_cast<long>(t) - i >= 0)
                                  ? eps[t - static_cast<std::size_t>(i)] *
                                        eps[t - static_cast<std::size_t>(i)]
                                  : h0;
            value += params.alpha(i - 1) * e2;
        }
        for (int j = 1; j <= p; ++j) {
            const double hj =
                (static_cast<long>(t) - j >= 0) ? h[t - static_cast<std::size_t>(j)] : h0;
            value += params.beta(j - 1) * hj;
        }
        h[t] = value;
    }
    return h;
}

std::vector<double> egarch_filter(const GarchParams& params, std::span<const double> eps,
                                  double h0, bool literal_leverage) {
    if (!(h0 > 0.0)) throw std::invalid_argument("egarch_filter: h0 > 0 required");
    const int q = static_cast<int>(params.alpha.size());
    const int p = static_cast<int>(params.beta.size());
    if (params.gamma.size() != q) {
        throw std::invalid_argument("egarch_filter: gamma size must equal q");
    }
    std::vector<double> h(eps.size());
    std::vector<double> log_h(eps.size());
    const double log_h0 = std::log(h0);
    for (std::size_t t = 0; t < eps.size(); ++t) {
        double value = params.omega;
        for (int j = 1; j <= p; ++j) {
            const double lhj = (static_cast<long>(t) - j >= 0)
                                   ? log_h[t - static_cast<std::size_t>(j)]
                                   : log_h0;
            value += params.beta(j - 1) * lhj;
        }
        for (int i = 1; i <= q; ++i) {
            if (static_cast<long>(t) - i < 0) continue;  // pre-sample shocks enter as 0
            const std::size_t k = t - static_cast<std::size_t>(i);
            const double hk = h[k];
            const double z = eps[k] / std::sqrt(hk);
            const double lever = literal_leverage ? eps[k] / hk : z;
            value += params.alpha(i - 1) * std::fabs(z) + params.gamma(i - 1) * lever;
        }
        value = std::clamp(value, -kLogHClamp, kLogHClamp);
        log_h[t] = value;
        h[t] = std::exp(value);
    }
    return h;
}

// ===========================================================================
// Mean-equation data and likelihood
// ===========================================================================

namespace {

struct MeanData {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;                       // includes the intercept column if requested
    std::vector<std::string> coef_names;
};

MeanData build_mean_data(const GarchSpec& spec, const TimeSeriesFrame& frame) {
    spec.validate();
    const bool diff_any = !spec.difference_columns.empty();
    const auto needs_diff = [&](const std::string& name) {
        return std::find(spec.difference_columns.begin(), spec.difference_columns.end(), name) !=
               spec.difference_columns.end();
    };
    const auto fetch = [&](const std::string& name) {
        std::vector<double> col = frame.column(name);
        if (needs_diff(name)) return first_difference(col);
        if (diff_any) col.erase(col.begin());  // align with the differenced columns
        return col;
    };

    const std::vector<double> y = fetch(spec.target);
    const std::size_t n = y.size();

    MeanData data;
    data.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<long>(n));
    data.x.resize(static_cast<long>(n), spec.mean_coefficient_count());
    long c = 0;
    if (spec.intercept) {
        data.x.col(c).setOnes();
        data.coef_names.emplace_back("Intercept");
        ++c;
    }
    for (const auto& name : spec.mean_regressors) {
        const std::vector<double> col = fetch(name);
        if (col.size() != n) throw std::invalid_argument("mean regressor length mismatch");
        data.x.col(c) = Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<long>(n));
        data.coef_names.push_back(name);
        ++c;
    }
    return data;
}

// Core likelihood. Returns -inf instead of throwing so optimizers can treat
// rejected regions uniformly. h0 <= 0 requests the self-consistent pre-sample
// variance mean(eps^2).
double loglik_impl(const GarchSpec& spec, const GarchParams& params, const MeanData& data,
                   double h0) {
    if (params.mean.size() != data.x.cols()) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd eps = data.y - data.x * params.mean;
    const std::size_t n = static_cast<std::size_t>(eps.size());
    if (n == 0) return -std::numeric_limits<double>::infinity();
    if (h0 <= 0.0) h0 = std::max(eps.squaredNorm() / static_cast<double>(n), kMinH0);

    std::vector<double> eps_v(eps.data(), eps.data() + eps.size());
    std::vector<double> h;
    try {
        h = spec.family == GarchFamily::Garch
                ? garch_filter(params, eps_v, h0)
                : egarch_filter(params, eps_v, h0, spec.literal_egarch_leverage);
    } catch (const std::exception&) {
        return -std::numeric_limits<double>::infinity();
    }

    double ll = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (!(h[t] > 0.0) || !std::isfinite(h[t])) {
            return -std::numeric_limits<double>::infinity();
        }
        ll -= 0.5 * (kLog2Pi + std::log(h[t]) + eps_v[t] * eps_v[t] / h[t]);
    }
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
}

}  // namespace

double gaussian_loglik(const GarchSpec& spec, const GarchParams& params,
                       const TimeSeriesFrame& frame) {
    const MeanData data = build_mean_data(spec, frame);
    const double ll = loglik_impl(spec, params, data, 0.0);
    if (!std::isfinite(ll)) throw numerical_error("gaussian_loglik: non-finite result");
    return ll;
}

double loglik_at(const GarchFit& fit, const GarchParams& params, const TimeSeriesFrame& frame) {
    const MeanData data = build_mean_data(fit.spec, frame);
    return loglik_impl(fit.spec, params, data, fit.h0);
}

// ===========================================================================
// Parameter transform
// ===========================================================================

Eigen::VectorXd to_unconstrained(const GarchSpec& spec, const GarchParams& params) {
    const int m = static_cast<int>(params.mean.size());
    const int q = spec.q;
    const int p = spec.p;
    if (spec.family == GarchFamily::Garch) {
        // [mean, log omega, logistic-simplex raws for (alpha, beta)]
        Eigen::VectorXd theta(m + 1 + q + p);
        theta.head(m) = params.mean;
        theta(m) = std::log(params.omega);
        double total = 0.0;
        Eigen::VectorXd u(q + p);
        for (int i = 0; i < q; ++i) u(i) = params.alpha(i) / (1.0 - kSimplexMargin);
        for (int j = 0; j < p; ++j) u(q + j) = params.beta(j) / (1.0 - kSimplexMargin);
        total = u.sum();
        if (!(total < 1.0)) throw std::invalid_argument("to_unconstrained: persistence >= 1");
        for (int i = 0; i < q + p; ++i) {
            const double share = std::max(u(i), 1e-12);
            theta(m + 1 + i) = std::log(share / (1.0 - total));
        }
        return theta;
    }
    // EGARCH: [mean, omega, alpha, gamma, softsign raws for beta]
    Eigen::VectorXd theta(m + 1 + q + q + p);
    theta.head(m) = params.mean;
    theta(m) = params.omega;
    theta.segment(m + 1, q) = params.alpha;
    theta.segment(m + 1 + q, q) = params.gamma;
    const double abs_sum = params.beta.cwiseAbs().sum() / (1.0 - kSimplexMargin);
    if (!(abs_sum < 1.0)) throw std::invalid_argument("to_unconstrained: |beta| sum >= 1");
    for (int j = 0; j < p; ++j) {
        theta(m + 1 + 2 * q + j) = (params.beta(j) / (1.0 - kSimplexMargin)) / (1.0 - abs_sum);
    }
    return theta;
}

GarchParams from_unconstrained(const GarchSpec& spec, const Eigen::VectorXd& theta) {
    const int m = spec.mean_coefficient_count();
    const int q = spec.q;
    const int p = spec.p;
    GarchParams params;
    params.mean = theta.head(m);
    if (spec.family == GarchFamily::Garch) {
        if (theta.size() != m + 1 + q + p) {
            throw std::invalid_argument("from_unconstrained: wrong theta size");
        }
        params.omega = std::exp(theta(m));
        double denom = 1.0;
        Eigen::VectorXd e(q + p);
        for (int i = 0; i < q + p; ++i) {
            e(i) = std::exp(theta(m + 1 + i));
            denom += e(i);
        }
        params.alpha.resize(q);
        params.beta.resize(p);
        for (int i = 0; i < q; ++i) params.alpha(i) = (1.0 - kSimplexMargin) * e(i) / denom;
        for (int j = 0; j < p; ++j) params.beta(j) = (1.0 - kSimplexMargin) * e(q + j) / denom;
        params.gamma.resize(0);
        return params;
    }
    if (theta.size() != m + 1 + 2 * q + p) {
        throw std::invalid_argument("from_unconstrained: wrong theta size");
    }
    params.omega = theta(m);
    params.alpha = theta.segment(m + 1, q);
    params.gamma = theta.segment(m + 1 + q, q);
    params.beta.resize(p);
    double abs_sum = 1.0;
    for (int j = 0; j < p; ++j) abs_sum += std::fabs(theta(m + 1 + 2 * q + j));
    for (int j = 0; j < p; ++j) {
        params.beta(j) = (1.0 - kSimplexMargin) * theta(m + 1 + 2 * q + j) / abs_sum;
    }
    return params;
}

// ===========================================================================
// Information criteria / fit statistics
// ===========================================================================

InformationCriteria information_criteria(double loglik, int k, int n, bool per_observation) {
    if (k < 1) throw std::invalid_argument("information_criteria: k >= 1 required");
    if (n <= k) throw std::invalid_argument("information_criteria: n > k required");
    const double scale = per_observation ? static_cast<double>(n) : 1.0;
    InformationCriteria ic;
    ic.aic = (-2.0 * loglik + 2.0 * k) / scale;
    ic.sic = (-2.0 * loglik + k * std::log(static_cast<double>(n))) / scale;
    ic.hqc = (-2.0 * loglik + 2.0 * k * std::log(std::log(static_cast<double>(n)))) / scale;
    return ic;
}

std::pair<double, double> fit_statistics(const GarchFit& fit, const TimeSeriesFrame& frame) {
    const MeanData data = build_mean_data(fit.spec, frame);
    const Eigen::VectorXd eps = data.y - data.x * fit.params.mean;
    const double ssr = eps.squaredNorm();
    const double mean = data.y.mean();
    const double sst = (data.y.array() - mean).square().sum();
    if (sst <= 0.0) throw numerical_error("fit_statistics: zero target variance");
    const double r2 = 1.0 - ssr / sst;
    const double n = static_cast<double>(data.y.size());
    const double k = static_cast<double>(fit.spec.mean_regressors.size());
    const double adj = 1.0 - (1.0 - r2) * (n - 1.0) / (n - k - 1.0);
    return {r2, adj};
}

// ===========================================================================
// Fitting
// ===========================================================================

namespace {

GarchParams initial_params(const GarchSpec& spec, const Eigen::VectorXd& ols_coef, double h0) {
    GarchParams params;
    params.mean = ols_coef;
    const int q = spec.q;
    const int p = spec.p;
    params.alpha.resize(q);
    params.beta.resize(p);
    if (spec.family == GarchFamily::Garch) {
        params.alpha.setConstant(0.10 / q);
        if (p > 0) params.beta.setConstant(0.80 / p);
        params.omega = h0 * (1.0 - params.persistence());
        params.gamma.resize(0);
    } else {
        params.alpha.setConstant(0.10 / q);
        params.gamma = Eigen::VectorXd::Zero(q);
        if (p > 0) params.beta.setConstant(0.80 / p);
        params.omega = (1.0 - params.beta.sum()) * std::log(h0);
    }
    return params;
}

}  // namespace

GarchFit fit_garch(const GarchSpec& spec, const TimeSeriesFrame& frame,
                   std::uint64_t restart_seed) {
    spec.validate();
    const MeanData data = build_mean_data(spec, frame);
    const long n = data.y.size();
    if (n < 30 + static_cast<long>(spec.mean_regressors.size())) {
        throw std::invalid_argument("fit_garch: insufficient observations");
    }
    if (!data.y.allFinite() || !data.x.allFinite()) {
        throw std::invalid_argument("fit_garch: non-finite data");
    }

    // Warm start: OLS mean, moment-matched variance scale.
    Eigen::VectorXd mean_init(spec.mean_coefficient_count());
    Eigen::VectorXd mean_resid = data.y;
    if (mean_init.size() > 0) {
        const OlsFit mean_ols = ols(data.x, data.y);
        mean_init = mean_ols.coef;
        mean_resid = mean_ols.residuals;
    }
    const double h0 = std::max(mean_resid.squaredNorm() / static_cast<double>(n), kMinH0);

    const GarchParams init = initial_params(spec, mean_init, h0);
    const Eigen::VectorXd theta0 = to_unconstrained(spec, init);

    const auto objective = [&](const Eigen::VectorXd& theta) {
        GarchParams params;
        try {
            params = from_unconstrained(spec, theta);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
        return -loglik_impl(spec, params, data, h0);
    };

    Rng rng(restart_seed);
    Eigen::VectorXd best_theta;
    double best_value = std::numeric_limits<double>::infinity();
    constexpr int kRestarts = 5;
    for (int attempt = 0; attempt <= kRestarts; ++attempt) {
        Eigen::VectorXd start = theta0;
        if (attempt > 0) {
            for (long i = 0; i < start.size(); ++i) start(i) += 0.25 * rng.normal();
        }
        NelderMeadOptions nm;
        nm.max_iter = 400 * static_cast<int>(start.size());
        const OptimResult warm = nelder_mead(objective, start, nm);
        const OptimResult polished = bfgs_minimize(objective, warm.x);
        const double value = std::min(warm.value, polished.value);
        const Eigen::VectorXd& candidate = polished.value <= warm.value ? polished.x : warm.x;
        if (value < best_value) {
            best_value = value;
            best_theta = candidate;
        }
        if (std::isfinite(best_value)) break;  // restart only on failure
    }
    if (!std::isfinite(best_value)) {
        throw numerical_error("fit_garch: optimizer failed to reach a finite likelihood");
    }

    GarchFit fit;
    fit.spec = spec;
    fit.params = from_unconstrained(spec, best_theta);
    fit.h0 = h0;
    fit.loglik = -best_value;

    const Eigen::VectorXd eps = data.y - data.x * fit.params.mean;
    fit.residuals.assign(eps.data(), eps.data() + eps.size());
    fit.h = spec.family == GarchFamily::Garch
                ? garch_filter(fit.params, fit.residuals, h0)
                : egarch_filter(fit.params, fit.residuals, h0, spec.literal_egarch_leverage);
    fit.std_residuals.resize(fit.residuals.size());
    for (std::size_t t = 0; t < fit.residuals.size(); ++t) {
        fit.std_residuals[t] = fit.residuals[t] / std::sqrt(fit.h[t]);
    }

    // Inference: inverse numerical Hessian of -loglik in natural space.
    const int m = spec.mean_coefficient_count();
    const int q = spec.q;
    const int p = spec.p;
    const int n_var = spec.family == GarchFamily::Garch ? 1 + q + p : 1 + 2 * q + p;
    Eigen::VectorXd natural(m + n_var);
    natural.head(m) = fit.params.mean;
    natural(m) = fit.params.omega;
    natural.segment(m + 1, q) = fit.params.alpha;
    if (spec.family == GarchFamily::Garch) {
        natural.segment(m + 1 + q, p) = fit.params.beta;
    } else {
        natural.segment(m + 1 + q, q) = fit.params.gamma;
        natural.segment(m + 1 + 2 * q, p) = fit.params.beta;
    }

    const auto natural_objective = [&](const Eigen::VectorXd& v) {
        GarchParams params;
        params.mean = v.head(m);
        params.omega = v(m);
        params.alpha = v.segment(m + 1, q);
        if (spec.family == GarchFamily::Garch) {
            params.beta = v.segment(m + 1 + q, p);
            params.gamma.resize(0);
            if (!(params.omega > 0.0) || (params.alpha.array() < 0.0).any() ||
                (params.beta.array() < 0.0).any() || params.persistence() >= 1.0) {
                return std::numeric_limits<double>::infinity();
            }
        } else {
            params.gamma = v.segment(m + 1 + q, q);
            params.beta = v.segment(m + 1 + 2 * q, p);
            if (params.beta.cwiseAbs().sum() >= 1.0) {
                return std::numeric_limits<double>::infinity();
            }
        }
        return -loglik_impl(spec, params, data, h0);
    };

    const Eigen::MatrixXd hess = numerical_hessian(natural_objective, natural, 1e-4);
    Eigen::VectorXd se = Eigen::VectorXd::Constant(natural.size(),
                                                   std::numeric_limits<double>::quiet_NaN());
    fit.inference_reliable = hess.allFinite();
    if (fit.inference_reliable) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        const Eigen::MatrixXd cov =
            ldlt.solve(Eigen::MatrixXd::Identity(natural.size(), natural.size()));
        for (long i = 0; i < natural.size(); ++i) {
            if (cov(i, i) > 0.0 && std::isfinite(cov(i, i))) {
                se(i) = std::sqrt(cov(i, i));
            } else {
                fit.inference_reliable = false;
            }
        }
    }

    std::vector<std::string> names = data.coef_names;
    names.emplace_back("omega");
    for (int i = 1; i <= q; ++i) names.push_back("alpha(" + std::to_string(i) + ")");
    if (spec.family == GarchFamily::Egarch) {
        for (int i = 1; i <= q; ++i) names.push_back("gamma(" + std::to_string(i) + ")");
    }
    for (int j = 1; j <= p; ++j) names.push_back("beta(" + std::to_string(j) + ")");

    for (long i = 0; i < natural.size(); ++i) {
        Coefficient c;
        c.name = names[static_cast<std::size_t>(i)];
        c.estimate = natural(i);
        c.std_error = se(i);
        c.z = std::isfinite(se(i)) && se(i) > 0.0
                  ? natural(i) / se(i)
                  : std::numeric_limits<double>::quiet_NaN();
        c.p_value = std::isfinite(c.z) ? 2.0 * normal_sf(std::fabs(c.z)) : 1.0;
        c.stars = std::isfinite(c.z) ? significance_stars(c.p_value) : "";
        fit.coefficients.push_back(std::move(c));
    }

    const InformationCriteria ic =
        information_criteria(fit.loglik, static_cast<int>(natural.size()), static_cast<int>(n));
    fit.aic = ic.aic;
    fit.sic = ic.sic;
    fit.hqc = ic.hqc;

    const auto [r2, adj] = fit_statistics(fit, frame);
    fit.r2 = r2;
    fit.adj_r2 = adj;
    return fit;
}

// ===========================================================================
// Forecast / diagnostics / serialization
// ===========================================================================

GarchForecast forecast(const GarchFit& fit, const TimeSeriesFrame& future, int horizon) {
    if (horizon < 0) throw std::invalid_argument("forecast: horizon >= 0 required");
    const GarchSpec& spec = fit.spec;
    for (const auto& name : spec.mean_regressors) {
        if (!future.has_column(name)) {
            throw std::invalid_argument("forecast: missing regressor '" + name + "'");
        }
    }
    if (future.rows() < static_cast<std::size_t>(horizon)) {
        throw std::invalid_argument("forecast: future rows < horizon");
    }

    GarchForecast out;
    out.mean.reserve(static_cast<std::size_t>(horizon));
    out.variance.reserve(static_cast<std::size_t>(horizon));

    for (int j = 0; j < horizon; ++j) {
        double mean = 0.0;
        long c = 0;
        if (spec.intercept) mean += fit.params.mean(c++);
        for (const auto& name : spec.mean_regressors) {
            mean += fit.params.mean(c++) * future.column(name)[static_cast<std::size_t>(j)];
        }
        out.mean.push_back(mean);
    }

    const std::size_t n = fit.residuals.size();
    const int q = spec.q;
    const int p = spec.p;
    if (spec.family == GarchFamily::Garch) {
        // eps^2 beyond the sample is replaced by its conditional expectation h.
        std::vector<double> eps2(n);
        for (std::size_t t = 0; t < n; ++t) eps2[t] = fit.residuals[t] * fit.residuals[t];
        std::vector<double> h_ext = fit.h;
        for (int j = 0; j < horizon; ++j) {
            const std::size_t t = n + static_cast<std::size_t>(j);
            double value = fit.params.omega;
            for (int i = 1; i <= q; ++i) {
                const std::size_t k = t - static_cast<std::size_t>(i);
                value += fit.params.alpha(i - 1) * (k < n ? eps2[k] : h_ext[k]);
            }
            for (int jj = 1; jj <= p; ++jj) {
                value += fit.params.beta(jj - 1) * h_ext[t - static_cast<std::size_t>(jj)];
            }
            h_ext.push_back(value);
            out.variance.push_back(value);
        }
    } else {
        const double expected_abs_z = std::sqrt(2.0 / 3.14159265358979323846);
        std::vector<double> log_h(n);
        for (std::size_t t = 0; t < n; ++t) log_h[t] = std::log(fit.h[t]);
        for (int j = 0; j < horizon; ++j) {
            const std::size_t t = n + static_cast<std::size_t>(j);
            double value = fit.params.omega;
            for (int jj = 1; jj <= p; ++jj) {
                value += fit.params.beta(jj - 1) * log_h[t - static_cast<std::size_t>(jj)];
            }
            for (int i = 1; i <= q; ++i) {
                const std::size_t k = t - static_cast<std::size_t>(i);
                if (k < n) {
                    const double z = fit.std_residuals[k];
                    const double lever =
                        spec.literal_egarch_leverage ? fit.residuals[k] / fit.h[k] : z;
                    value += fit.params.alpha(i - 1) * std::fabs(z) +
                             fit.params.gamma(i - 1) * lever;
                } else {
                    value += fit.params.alpha(i - 1) * expected_abs_z;  // E z = 0
                }
            }
            value = std::clamp(value, -kLogHClamp, kLogHClamp);
            log_h.push_back(value);
            out.variance.push_back(std::exp(value));
        }
    }
    return out;
}

ResidualDiagnostics residual_diagnostics(const GarchFit& fit) {
    ResidualDiagnostics d;
    d.stats = describe(fit.std_residuals);
    d.jarque_bera = jarque_bera(fit.std_residuals);
    return d;
}

nlohmann::json GarchFit::to_json() const {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : coefficients) {
        coeffs.push_back({{"name", c.name},
                          {"estimate", c.estimate},
                          {"std_error", c.std_error},
                          {"z", c.z},
                          {"p_value", c.p_value},
                          {"stars", c.stars}});
    }
    return {{"family", to_string(spec.family)},
            {"p", spec.p},
            {"q", spec.q},
            {"coefficients", std::move(coeffs)},
            {"loglik", loglik},
            {"aic", aic},
            {"sic", sic},
            {"hqc", hqc},
            {"r2", r2},
            {"adj_r2", adj_r2},
            {"inference_reliable", inference_reliable}};
}

}  // namespace fxcast
